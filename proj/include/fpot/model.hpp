#pragma once

#include <cmath>

#include "fpot/common.hpp"

namespace fpot {

// Global conventions: J = 1 energy unit, lattice spacing 1, hbar = 1.
// Times are measured in 1/J throughout.

struct ModelParams {
  double delta = 0.0;    // anisotropy, gapless phase |delta| < 1
  double J = 1.0;        // exchange coupling
  double sigma_h = 0.0;  // disorder standard deviation
  double beta = kBetaInfinite;

  void validate() const {
    if (!(std::abs(delta) < 1.0))
      throw config_error("delta outside gapless phase (|delta| < 1 required)");
    if (!(J > 0)) throw config_error("J must be positive");
    if (!(sigma_h >= 0)) throw config_error("sigma_h must be non-negative");
    if (!(beta > 0)) throw config_error("beta must be positive or infinite");
  }
};

struct LuttingerParams {
  double u = 0.0;      // sound velocity
  double K = 0.0;      // Luttinger parameter
  double gamma = 0.0;  // continuum disorder strength
  double g = 0.0;      // dimensionless coupling 8*pi*K*gamma/u^2
};

// Bethe-ansatz map of the gapless XXZ chain: eta = arccos(delta),
// K = pi/(2(pi - eta)), u = J pi sin(eta)/(2 eta).
inline void bethe_params(double delta, double J, double& u, double& K) {
  if (!(std::abs(delta) < 1.0))
    throw config_error("bethe_params: |delta| >= 1 is outside the gapless phase");
  if (!(J > 0)) throw config_error("bethe_params: J must be positive");
  const double eta = std::acos(delta);
  K = kPi / (2.0 * (kPi - eta));
  u = J * kPi * std::sin(eta) / (2.0 * eta);
}

// Forward-scattering correlator of the unfiltered lattice field: gamma = sigma_h^2/pi^2.
inline double continuum_gamma(double sigma_h) {
  if (!(sigma_h >= 0)) throw config_error("continuum_gamma: sigma_h must be non-negative");
  return sigma_h * sigma_h / (kPi * kPi);
}

inline double coupling_g(double u, double K, double gamma) {
  if (!(u > 0)) throw config_error("coupling_g: u must be positive");
  return 8.0 * kPi * K * gamma / (u * u);
}

inline LuttingerParams luttinger_params(const ModelParams& mp) {
  mp.validate();
  LuttingerParams lp;
  bethe_params(mp.delta, mp.J, lp.u, lp.K);
  lp.gamma = continuum_gamma(mp.sigma_h);
  lp.g = coupling_g(lp.u, lp.K, lp.gamma);
  return lp;
}

}  // namespace fpot
