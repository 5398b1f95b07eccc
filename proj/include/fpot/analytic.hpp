#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <vector>

#include "fpot/common.hpp"

namespace fpot {

// Momentum grid of the open chain: q_n = pi n/(L+1), n = 1..L, with the
// UV regulator e^{-alpha q} attached as a per-mode weight.
struct ModeGrid {
  int L = 0;
  double alpha = 0.0;
  std::vector<double> momenta;
  std::vector<double> weights;

  ModeGrid(int L_, double alpha_) : L(L_), alpha(alpha_) {
    if (L < 1) throw config_error("ModeGrid: L must be >= 1");
    if (!(alpha >= 0)) throw config_error("ModeGrid: alpha must be >= 0");
    momenta.resize(L);
    weights.resize(L);
    for (int n = 1; n <= L; ++n) {
      momenta[n - 1] = kPi * n / (L + 1);
      weights[n - 1] = std::exp(-alpha * momenta[n - 1]);
    }
  }
};

struct QuenchSchedule {
  std::vector<double> durations;

  void validate() const {
    if (durations.empty()) throw config_error("QuenchSchedule: need at least one segment");
    for (double t : durations)
      if (!(t >= 0)) throw config_error("QuenchSchedule: durations must be >= 0");
  }
};

namespace detail {
inline double coth(double x) { return x > 350.0 ? 1.0 : 1.0 / std::tanh(x); }

inline void gsl_quiet() {
  static gsl_error_handler_t* const prev = gsl_set_error_handler_off();
  (void)prev;
}
}  // namespace detail

// A_q(T) = (g/|q|) sin^2(u|q|T/2) coth(beta u|q|/2); beta = inf means coth = 1.
inline double mode_weight(double q, double T, double g, double u, double beta) {
  if (q == 0.0) throw config_error("mode_weight: q=0 is excluded by the OBC grid");
  if (!(u > 0)) throw config_error("mode_weight: u must be positive");
  if (!(beta > 0)) throw config_error("mode_weight: beta must be positive or infinite");
  const double aq = std::abs(q);
  const double s = std::sin(u * aq * T / 2.0);
  const double thermal = is_infinite_beta(beta) ? 1.0 : detail::coth(beta * u * aq / 2.0);
  return (g / aq) * s * s * thermal;
}

// ln R^(k)(T) = -1/2 sum_q ln(1 + k A_q(T)) e^{-alpha q}.  The k dependence
// enters only through g -> g k; folding it into the coupling up front makes
// the k-vs-g substitution identity exact in floating point, not just in math.
inline double log_fp_ratio(const ModeGrid& grid, double g, double u, double beta, int k,
                           double T) {
  if (k < 1) throw config_error("log_fp_ratio: k must be a positive integer");
  const double geff = g * static_cast<double>(k);
  double acc = 0.0;
  for (int i = 0; i < grid.L; ++i)
    acc += std::log1p(mode_weight(grid.momenta[i], T, geff, u, beta)) * grid.weights[i];
  return -0.5 * acc;
}

// Thermodynamic-limit short-time law: ln R ~= -(k L g/8pi) ln((alpha^2 + u^2 T^2)/alpha^2).
// Valid for k A_q < 0.1 on all modes and u T <= 5 alpha, with alpha large
// enough that the regulator decays inside the Brillouin zone.
inline double short_time_log_ratio(int L, double alpha, double g, double u, int k, double T) {
  if (!(alpha > 0)) throw config_error("short_time_log_ratio: alpha must be positive");
  const double r = u * T / alpha;
  // k multiplies last so the k-dependence is exactly linear in floating point.
  const double base = -(L * g / (8.0 * kPi)) * std::log1p(r * r);
  return static_cast<double>(k) * base;
}

// Kernel of the late-time plateau: f(x) = ln(x/2) + gamma_E + e^x K0(x).
// Below x = 2 the two terms cancel (f ~ x ln(1/x) while each term is O(ln x)),
// which amplifies the Bessel rounding by up to five digits at x ~ 1e-4. The
// K0 power series regroups the difference into two positive terms:
//   f(x) = -S (e^x I0(x) - 1) + e^x sum_k (x^2/4)^k / (k!)^2 H_k,  S = ln(x/2) + gamma_E,
// both evaluated without cancellation. Above 2 both terms of the direct
// formula are positive, and the scaled Bessel call avoids overflow.
inline double plateau_kernel(double x) {
  if (!(x > 0)) throw config_error("plateau_kernel: x must be positive");
  detail::gsl_quiet();
  if (x >= 2.0) return std::log(x / 2.0) + kEulerGamma + gsl_sf_bessel_K0_scaled(x);
  const double t = x * x / 4.0;
  double term = t, i0m1 = t, hsum = t, harmonic = 1.0;
  for (int k = 2; k <= 40 && term > 1e-20 * hsum; ++k) {
    term *= t / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0m1 += term;
    hsum += term * harmonic;
  }
  const double ex = std::exp(x);
  const double s = std::log(x / 2.0) + kEulerGamma;
  return -s * (std::expm1(x) + ex * i0m1) + ex * hsum;
}

// Eq.-10 plateau: ln R^(k)(inf) = -(L/2 pi alpha) f(alpha g k / 2).
inline double plateau_log_ratio(int L, double alpha, double g, int k) {
  if (!(alpha > 0)) throw config_error("plateau_log_ratio: alpha must be positive");
  if (!(g > 0))
    throw config_error("plateau_log_ratio: g=0 is an indeterminate form; the limit value is 0");
  if (k < 1) throw config_error("plateau_log_ratio: k must be a positive integer");
  const double x = alpha * g * static_cast<double>(k) / 2.0;
  return -(static_cast<double>(L) / (2.0 * kPi * alpha)) * plateau_kernel(x);
}

// Closed form of the uniform-phase integral: int dtheta/2pi ln(1 + c sin^2) =
// 2 ln((1 + sqrt(1+c))/2); exposed for the oracle's identity test.
inline double theta_integral_closed(double c) {
  return 4.0 * kPi * std::log((1.0 + std::sqrt(1.0 + c)) / 2.0);
}

namespace detail {

struct ThetaParams {
  double c;
};

inline double theta_integrand(double theta, void* raw) {
  const double s = std::sin(theta);
  return std::log1p(static_cast<ThetaParams*>(raw)->c * s * s);
}

struct OuterParams {
  double alpha, gk;
  gsl_integration_workspace* inner_ws;
};

inline double theta_integral_quad(double c, gsl_integration_workspace* ws) {
  ThetaParams tp{c};
  gsl_function f{&theta_integrand, &tp};
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qags(&f, 0.0, 2.0 * kPi, 1e-12, 1e-10, 2048, ws, &result, &abserr);
  if (status != 0 && status != GSL_EROUND)
    throw numeric_error("theta quadrature failed, error estimate " + std::to_string(abserr));
  return result;
}

inline double outer_integrand(double q, void* raw) {
  auto* op = static_cast<OuterParams*>(raw);
  return std::exp(-op->alpha * q) * theta_integral_quad(op->gk / q, op->inner_ws);
}

}  // namespace detail

// int_0^{2pi} ln(1 + c sin^2 theta) dtheta by adaptive quadrature.
inline double theta_integral_quadrature(double c) {
  detail::gsl_quiet();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2048);
  double r;
  try {
    r = detail::theta_integral_quad(c, ws);
  } catch (...) {
    gsl_integration_workspace_free(ws);
    throw;
  }
  gsl_integration_workspace_free(ws);
  return r;
}

// Independent plateau oracle: -(L/4 pi^2) int_0^inf dq e^{-alpha q} int_0^{2pi}
// dtheta ln(1 + (g k/q) sin^2 theta), both integrals numerical.
inline double plateau_quadrature_oracle(int L, double alpha, double g, int k) {
  if (!(g >= 0)) throw config_error("plateau_quadrature_oracle: g must be >= 0");
  if (g == 0.0) return 0.0;
  detail::gsl_quiet();
  gsl_integration_workspace* outer_ws = gsl_integration_workspace_alloc(2048);
  gsl_integration_workspace* inner_ws = gsl_integration_workspace_alloc(2048);
  detail::OuterParams op{alpha, g * static_cast<double>(k), inner_ws};
  gsl_function f{&detail::outer_integrand, &op};
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qagiu(&f, 0.0, 1e-13, 1e-9, 2048, outer_ws, &result, &abserr);
  gsl_integration_workspace_free(inner_ws);
  gsl_integration_workspace_free(outer_ws);
  if (status != 0 && status != GSL_EROUND)
    throw numeric_error("plateau quadrature failed, error estimate " + std::to_string(abserr));
  return -(static_cast<double>(L) / (4.0 * kPi * kPi)) * result;
}

struct StrongDisorderResult {
  bool valid = false;      // false when any sin^2 < 1/g (log singularity regime)
  double value = 0.0;
  double min_sin2 = 0.0;
};

// Strong-disorder asymptote: ln R ~= -1/2 sum_q [ln((g/q) coth(..)) + ln sin^2] e^{-alpha q}.
// Near mode-commensurate times the ln sin^2 term diverges; the breakdown is
// reported instead of a number whenever sin^2 drops below 1/g on any mode.
inline StrongDisorderResult strong_disorder_log_ratio(const ModeGrid& grid, double g, double u,
                                                      double beta, double T) {
  if (!(g > 0)) throw config_error("strong_disorder_log_ratio: g must be positive");
  StrongDisorderResult res;
  res.min_sin2 = 1.0;
  double acc = 0.0;
  for (int i = 0; i < grid.L; ++i) {
    const double q = grid.momenta[i];
    const double s = std::sin(u * q * T / 2.0);
    const double s2 = s * s;
    if (s2 < res.min_sin2) res.min_sin2 = s2;
    const double thermal = is_infinite_beta(beta) ? 1.0 : detail::coth(beta * u * q / 2.0);
    acc += (std::log(g / q * thermal) + std::log(s2)) * grid.weights[i];
  }
  res.valid = res.min_sin2 * g >= 1.0;
  res.value = -0.5 * acc;
  return res;
}

// Eq.-12 accumulation over quench segments, mode-major.
inline double multiquench_log_ratio(const ModeGrid& grid, double g, double u, double beta, int k,
                                    const QuenchSchedule& schedule) {
  schedule.validate();
  if (k < 1) throw config_error("multiquench_log_ratio: k must be a positive integer");
  const double geff = g * static_cast<double>(k);
  double acc = 0.0;
  for (int i = 0; i < grid.L; ++i) {
    double per_mode = 0.0;
    for (double Tj : schedule.durations)
      per_mode += std::log1p(mode_weight(grid.momenta[i], Tj, geff, u, beta));
    acc += per_mode * grid.weights[i];
  }
  return -0.5 * acc;
}

struct RevivalTime {
  double ballistic_estimate = 0.0;  // 2L/u
  double exact_period = 0.0;    // 2(L+1)/u, exact period of Eq. 9 at beta = inf
};

inline RevivalTime revival_time(int L, double u) {
  if (L < 1 || !(u > 0)) throw config_error("revival_time: need L >= 1 and u > 0");
  return {2.0 * L / u, 2.0 * (L + 1) / u};
}

}  // namespace fpot
