#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fpot/analysis.hpp"

using namespace fpot;

namespace {

FpCurve analytic_curve(int L, double alpha, const ModelParams& mp, int k_max,
                       const std::vector<double>& times) {
  const LuttingerParams lp = luttinger_params(mp);
  const ModeGrid grid(L, alpha);
  FpCurve c;
  c.times = times;
  c.k_max = k_max;
  c.n_dis = 100;
  c.mean.assign(k_max, std::vector<double>(times.size(), 0.0));
  c.stderr_.assign(k_max, std::vector<double>(times.size(), 0.0));
  for (int k = 1; k <= k_max; ++k)
    for (size_t i = 0; i < times.size(); ++i)
      c.mean[k - 1][i] = std::exp(log_fp_ratio(grid, lp.g, lp.u, mp.beta, k, times[i]));
  return c;
}

FpCurve ramp_curve(const std::vector<double>& times, const std::vector<double>& r,
                   double se = 0.01) {
  FpCurve c;
  c.times = times;
  c.k_max = 1;
  c.n_dis = 50;
  c.mean = {r};
  c.stderr_ = {std::vector<double>(times.size(), se)};
  return c;
}

std::vector<double> linspace_int(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = i;
  return t;
}

}  // namespace

TEST_CASE("alpha fit recovers the generating cutoff", "[analysis]") {
  const ModelParams mp{0.0, 1.0, 0.05, kBetaInfinite};
  const FpCurve curve = analytic_curve(64, 0.13, mp, 3, linspace_int(61));
  const AlphaFit fit = fit_alpha(curve, mp, 64, 10.0, 50.0);
  CHECK(fit.alpha == Catch::Approx(0.13).margin(1e-5));
  CHECK(fit.mse < 1e-15);
  CHECK_FALSE(fit.at_boundary);
  CHECK_FALSE(fit.degenerate);

  // self-comparison at the fitted alpha is exact
  const auto idx = std::vector<size_t>{10, 20, 30};
  CHECK(log_mse_vs_analytic(curve, 2, 64, luttinger_params(mp), mp.beta, idx, 0.13) < 1e-20);
}

TEST_CASE("alpha fit flags the clamped and flat cases", "[analysis]") {
  const ModelParams mp{0.0, 1.0, 0.05, kBetaInfinite};
  const FpCurve at_zero = analytic_curve(64, 0.0, mp, 1, linspace_int(61));
  const AlphaFit clamped = fit_alpha(at_zero, mp, 64, 10.0, 50.0);
  CHECK(clamped.at_boundary);
  CHECK(clamped.alpha == 0.0);

  // g = 0 makes the objective independent of alpha
  const ModelParams clean{0.0, 1.0, 0.0, kBetaInfinite};
  const AlphaFit flat = fit_alpha(at_zero, clean, 64, 10.0, 50.0);
  CHECK(flat.degenerate);

  CHECK_THROWS_AS(fit_alpha(at_zero, mp, 64, 10.0, 12.0), config_error);  // 3 points
  CHECK_THROWS_AS(fit_alpha(at_zero, mp, 64, 50.0, 10.0), config_error);
}

TEST_CASE("log mse rejects unusable curve values", "[analysis]") {
  const ModelParams mp{0.0, 1.0, 0.05, kBetaInfinite};
  FpCurve bad = analytic_curve(16, 0.1, mp, 1, linspace_int(20));
  bad.mean[0][5] = 0.0;
  CHECK_THROWS_AS(
      log_mse_vs_analytic(bad, 1, 16, luttinger_params(mp), mp.beta, {4, 5, 6}, 0.1),
      numeric_error);
}

TEST_CASE("plateau extraction averages the tail", "[analysis]") {
  std::vector<double> times = linspace_int(21), r(21);
  for (int i = 0; i < 21; ++i) r[i] = std::max(std::exp(-0.5 * times[i]), 0.3);
  const FpCurve c = ramp_curve(times, r, 0.003);
  const auto p = extract_plateau(c, 0.1);  // last 3 points
  REQUIRE(p.size() == 1);
  CHECK(p[0].k == 1);
  CHECK(p[0].ln_r == Catch::Approx(std::log(0.3)).epsilon(1e-12));
  CHECK(p[0].err == Catch::Approx(std::sqrt(3.0 * 1e-4) / 3.0).epsilon(1e-10));

  std::vector<double> rising = r;
  rising[20] = 0.95;
  CHECK_THROWS_AS(extract_plateau(ramp_curve(times, rising), 0.1), numeric_error);
  CHECK_THROWS_AS(extract_plateau(c, 0.0), config_error);
  CHECK_THROWS_AS(extract_plateau(c, 1.0), config_error);  // window swallows curve
}

TEST_CASE("collapse coordinates", "[analysis]") {
  std::vector<PlateauPoint> pts{{1, -2.0, 0.1}, {3, -5.0, 0.2}};
  AlphaFit fit;
  fit.alpha = 0.08;
  const auto col = collapse_points(pts, fit, 0.00637, "c1");
  REQUIRE(col.size() == 2);
  CHECK(col[0].x == Catch::Approx(0.08 * 0.00637).epsilon(1e-15));
  CHECK(col[1].x == Catch::Approx(0.08 * 0.00637 * 3).epsilon(1e-15));
  CHECK(col[0].y == Catch::Approx(-0.16).epsilon(1e-15));
  CHECK(col[1].yerr == Catch::Approx(0.016).epsilon(1e-15));
  CHECK(col[1].curve_id == "c1");

  CHECK(collapse_reference_unit(1.0) == Catch::Approx(-plateau_kernel(0.5)).epsilon(1e-15));
}

TEST_CASE("multiquench slope fit", "[analysis]") {
  const std::vector<double> m{1.0, 2.0, 3.0, 4.0};
  std::vector<double> y;
  for (double v : m) y.push_back(-0.7 * v);
  const SlopeFit exact = multiquench_slope(m, y);
  CHECK(exact.slope == Catch::Approx(-0.7).epsilon(1e-14));
  CHECK(exact.residual_norm < 1e-14);

  std::vector<double> off = y;
  for (double& v : off) v += 0.1;
  CHECK(multiquench_slope(m, off).residual_norm > 0.05);

  CHECK_THROWS_AS(multiquench_slope({1.0}, {2.0}), config_error);
  CHECK_THROWS_AS(multiquench_slope({1.0, 2.0}, {1.0}), config_error);
}

TEST_CASE("revival detection on a deep dip", "[analysis]") {
  // L = 20, u = 1: estimate 2L/u = 40; dip 0.2 at t = 20, recovery by t = 40
  const int n = 45;
  std::vector<double> times = linspace_int(n), r(n);
  for (int i = 0; i < n; ++i) {
    const double t = times[i];
    r[i] = t <= 20 ? 1.0 - 0.04 * t : std::min(1.0, 0.2 + 0.8 * (t - 20.0) / 20.0);
  }
  const auto det = detect_revival(ramp_curve(times, r), 20, 1.0);
  REQUIRE(det.found);
  CHECK_FALSE(det.degenerate);
  CHECK(det.dip == Catch::Approx(0.2));
  CHECK(det.threshold_used == Catch::Approx(0.9));
  // crossing of 0.9 happens between t = 37 and t = 38
  CHECK(det.t == Catch::Approx(38.0));
}

TEST_CASE("revival detection shallow-dip branches", "[analysis]") {
  const int n = 45;
  std::vector<double> times = linspace_int(n), shallow(n), faint(n);
  for (int i = 0; i < n; ++i) {
    const double t = times[i];
    // dip to 0.95 at t = 20, recovery reaching 1 past the grid end
    shallow[i] = t <= 20 ? 1.0 - 0.0025 * t : std::min(1.0, 0.95 + 0.05 * (t - 20.0) / 21.0);
    faint[i] = 0.997;
  }
  const auto det = detect_revival(ramp_curve(times, shallow), 20, 1.0);
  REQUIRE(det.found);
  CHECK(det.threshold_used == Catch::Approx(0.975));
  CHECK(det.t == Catch::Approx(31.0));  // first grid point past the 30.5 crossing

  const auto none = detect_revival(ramp_curve(times, faint), 20, 1.0);
  CHECK(none.degenerate);
  CHECK_FALSE(none.found);

  CHECK_THROWS_AS(detect_revival(ramp_curve(times, shallow), 30, 1.0), config_error);
}

TEST_CASE("curve truncation", "[analysis]") {
  const ModelParams mp{0.0, 1.0, 0.05, kBetaInfinite};
  const FpCurve c = analytic_curve(16, 0.1, mp, 2, linspace_int(30));
  const FpCurve cut = truncate_curve(c, 12.5);
  CHECK(cut.times.size() == 13);
  CHECK(cut.times.back() == 12.0);
  CHECK(cut.mean[1].size() == 13);
  CHECK(cut.mean[0][12] == c.mean[0][12]);
  CHECK_THROWS_AS(truncate_curve(c, 0.5), config_error);
}
