#include <catch2/catch_amalgamated.hpp>

#include "fpot/model.hpp"

using namespace fpot;

TEST_CASE("free point is exact", "[model]") {
  double u = 0.0, K = 0.0;
  bethe_params(0.0, 1.0, u, K);
  CHECK(u == Catch::Approx(1.0).margin(1e-14));
  CHECK(K == Catch::Approx(1.0).margin(1e-14));

  bethe_params(0.0, 2.5, u, K);
  CHECK(u == Catch::Approx(2.5).margin(1e-14));
  CHECK(K == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("bethe values at half anisotropy", "[model]") {
  // eta = pi/3: K = 3/4, u = 3 sqrt(3)/4. eta = 2pi/3: K = 3/2, u = 3 sqrt(3)/8.
  double u = 0.0, K = 0.0;
  bethe_params(0.5, 1.0, u, K);
  CHECK(K == Catch::Approx(0.75).margin(1e-14));
  CHECK(u == Catch::Approx(1.2990381056766580).margin(1e-14));

  bethe_params(-0.5, 1.0, u, K);
  CHECK(K == Catch::Approx(1.5).margin(1e-14));
  CHECK(u == Catch::Approx(0.64951905283832900).margin(1e-14));
}

TEST_CASE("u increases and K decreases with delta", "[model]") {
  double prev_u = 0.0, prev_K = 1e9;
  for (double d = -0.9; d < 0.95; d += 0.1) {
    double u = 0.0, K = 0.0;
    bethe_params(d, 1.0, u, K);
    CHECK(u > prev_u);
    CHECK(K < prev_K);
    prev_u = u;
    prev_K = K;
  }
}

TEST_CASE("u scales linearly in J", "[model]") {
  double u1 = 0.0, K1 = 0.0, u3 = 0.0, K3 = 0.0;
  bethe_params(0.3, 1.0, u1, K1);
  bethe_params(0.3, 3.0, u3, K3);
  CHECK(u3 == Catch::Approx(3.0 * u1).epsilon(1e-15));
  CHECK(K3 == K1);
}

TEST_CASE("disorder coupling at the free point", "[model]") {
  // gamma = sigma^2/pi^2 and g = 8 pi K gamma / u^2 = 8 sigma^2 / pi at delta = 0.
  CHECK(continuum_gamma(0.05) == Catch::Approx(2.5330295910584444e-4).epsilon(1e-15));
  const LuttingerParams lp = luttinger_params({0.0, 1.0, 0.05, kBetaInfinite});
  CHECK(lp.g == Catch::Approx(0.02 / kPi).epsilon(1e-13));
  CHECK(lp.g == Catch::Approx(6.3661977236758135e-3).epsilon(1e-13));
}

TEST_CASE("g scales as sigma squared", "[model]") {
  const LuttingerParams a = luttinger_params({-0.4, 1.0, 0.05, kBetaInfinite});
  const LuttingerParams b = luttinger_params({-0.4, 1.0, 0.20, kBetaInfinite});
  CHECK(b.g == Catch::Approx(16.0 * a.g).epsilon(1e-12));
}

TEST_CASE("parameter validation", "[model]") {
  CHECK_THROWS_AS(ModelParams({1.0, 1.0, 0.05, kBetaInfinite}).validate(), config_error);
  CHECK_THROWS_AS(ModelParams({-1.0, 1.0, 0.05, kBetaInfinite}).validate(), config_error);
  CHECK_THROWS_AS(ModelParams({0.0, 0.0, 0.05, kBetaInfinite}).validate(), config_error);
  CHECK_THROWS_AS(ModelParams({0.0, 1.0, -0.1, kBetaInfinite}).validate(), config_error);
  CHECK_THROWS_AS(ModelParams({0.0, 1.0, 0.05, 0.0}).validate(), config_error);
  CHECK_NOTHROW(ModelParams({0.0, 1.0, 0.05, kBetaInfinite}).validate());
  CHECK_NOTHROW(ModelParams({-0.7, 1.0, 0.1, 12.0}).validate());
}
