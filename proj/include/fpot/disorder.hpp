#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fpot/common.hpp"
#include "fpot/rng.hpp"

namespace fpot {

// Normalized binomial kernel c_m = binomial(p, m)/2^p, m = 0..p.
// Coefficients are exact in double for p <= 30 (2^p divides exactly).
struct FilterKernel {
  int order = 0;
  std::vector<double> coefficients;

  explicit FilterKernel(int p) : order(p) {
    if (p < 0 || p > 30) throw config_error("filter order must be in [0, 30]");
    coefficients.resize(p + 1);
    double c = 1.0;  // binomial(p, 0)
    const double norm = std::ldexp(1.0, -p);
    for (int m = 0; m <= p; ++m) {
      coefficients[m] = c * norm;
      c = c * (p - m) / (m + 1);
    }
  }
};

inline std::vector<double> sample_raw_fields(int L, double sigma_h, std::uint64_t seed) {
  if (L < 1) throw config_error("sample_raw_fields: L must be >= 1");
  if (!(sigma_h >= 0)) throw config_error("sample_raw_fields: sigma_h must be >= 0");
  std::vector<double> h(L, 0.0);
  if (sigma_h == 0.0) return h;
  GaussianStream gs(seed);
  for (double& v : h) v = sigma_h * gs.next();
  return h;
}

// h~_i = sum_m c_m h_{i-m} with reflective extension h_{-n} = h_n at the left
// edge and h_{L-1+n} = h_{L-1-n} at the right edge.
inline std::vector<double> apply_filter(const std::vector<double>& h, int p) {
  const FilterKernel kernel(p);
  const int L = static_cast<int>(h.size());
  std::vector<double> out(L, 0.0);
  for (int i = 0; i < L; ++i) {
    double acc = 0.0;
    for (int m = 0; m <= p; ++m) {
      int j = i - m;
      if (j < 0) j = -j;
      if (j >= L) j = 2 * (L - 1) - j;
      acc += kernel.coefficients[m] * h[j];
    }
    out[i] = acc;
  }
  return out;
}

struct DisorderRealization {
  std::vector<double> values;  // filtered fields h~_i
  std::uint64_t raw_seed = 0;
  int filter_order = 0;
  double sigma_h = 0.0;
};

inline DisorderRealization make_realization(int L, double sigma_h, int p,
                                            std::uint64_t master, std::uint64_t realization,
                                            std::uint64_t role, std::uint64_t segment) {
  DisorderRealization r;
  r.raw_seed = substream_seed(master, realization, role, segment);
  r.filter_order = p;
  r.sigma_h = sigma_h;
  r.values = apply_filter(sample_raw_fields(L, sigma_h, r.raw_seed), p);
  return r;
}

// Power spectrum of the filtered field: S_p(q) = cos^{2p}(q/2) sigma_h^2.
inline double filter_spectrum_theory(double q, int p, double sigma_h) {
  return std::pow(std::cos(q / 2.0), 2 * p) * sigma_h * sigma_h;
}

struct SpectrumEstimate {
  std::vector<double> q;
  std::vector<double> value;
  std::vector<double> stderr_;
};

// Empirical S(q) from the bulk autocovariance. The filtered autocovariance
// has exact support |d| <= p, so the cosine transform is truncated there.
// Bulk window [p, L-p) keeps translation invariance (edges are reflective).
inline SpectrumEstimate filter_spectrum_estimate(int n_samples, int L, int p, double sigma_h,
                                                 std::uint64_t seed,
                                                 const std::vector<double>& momenta) {
  if (n_samples < 1) throw config_error("filter_spectrum_estimate: n_samples must be >= 1");
  if (L <= 4 * (p + 1)) throw config_error("filter_spectrum_estimate: L too small for bulk window");
  const int nq = static_cast<int>(momenta.size());
  std::vector<std::vector<double>> samples(nq, std::vector<double>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    const auto ht = apply_filter(sample_raw_fields(L, sigma_h, substream_seed(seed, s, 0, 0)), p);
    std::vector<double> cov(p + 1, 0.0);
    for (int d = 0; d <= p; ++d) {
      double acc = 0.0;
      int n_pairs = 0;
      for (int i = p; i + d < L - p; ++i, ++n_pairs) acc += ht[i] * ht[i + d];
      cov[d] = acc / n_pairs;
    }
    for (int iq = 0; iq < nq; ++iq) {
      double Sq = cov[0];
      for (int d = 1; d <= p; ++d) Sq += 2.0 * cov[d] * std::cos(momenta[iq] * d);
      samples[iq][s] = Sq;
    }
  }
  SpectrumEstimate est;
  est.q = momenta;
  est.value.resize(nq);
  est.stderr_.resize(nq, 0.0);
  for (int iq = 0; iq < nq; ++iq) {
    double sum = 0.0;
    for (double v : samples[iq]) sum += v;
    const double mean = sum / n_samples;
    est.value[iq] = mean;
    if (n_samples > 1) {
      double ss = 0.0;  // two-pass: stable when the scatter is far below the mean
      for (double v : samples[iq]) ss += (v - mean) * (v - mean);
      est.stderr_[iq] = std::sqrt(ss / (n_samples - 1) / n_samples);
    }
  }
  return est;
}

}  // namespace fpot
