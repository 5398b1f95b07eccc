#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#ifdef FPOT_USE_LAPACKE
#include <lapacke.h>
#endif

#include "fpot/common.hpp"
#include "fpot/curve.hpp"
#include "fpot/disorder.hpp"
#include "fpot/parallel.hpp"

namespace fpot {

// Zero-magnetization sector of the L-site chain: bitmasks with popcount L/2,
// ascending. The disorder couples through sum_i h~_i S^z_i, which conserves
// total S^z, so the dynamics never leaves the sector.
struct SectorBasis {
  int L = 0;
  std::vector<std::uint32_t> states;

  int dim() const { return static_cast<int>(states.size()); }

  int index_of(std::uint32_t s) const {
    const auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s) throw numeric_error("state outside S^z=0 sector");
    return static_cast<int>(it - states.begin());
  }
};

inline SectorBasis make_sector_basis(int L) {
  if (L < 2 || L % 2 != 0) throw config_error("sector basis: L must be even and >= 2");
  if (L > 14) throw config_error("sector basis: L > 14 exceeds the dense-ED budget");
  SectorBasis b;
  b.L = L;
  const std::uint32_t half = static_cast<std::uint32_t>(L) / 2;
  for (std::uint32_t s = 0; s < (1u << L); ++s)
    if (static_cast<std::uint32_t>(__builtin_popcount(s)) == half) b.states.push_back(s);
  return b;
}

struct ManyBodyHamiltonian {
  const SectorBasis* basis = nullptr;
  Eigen::MatrixXd H;
};

// (J/2)(S+_i S-_{i+1} + h.c.) + J delta S^z_i S^z_{i+1} + sum_i h~_i S^z_i,
// projected on the sector. Off-diagonal entries appear only for neighbor
// flips, so each row has at most L of them.
inline ManyBodyHamiltonian build_sector_hamiltonian(const SectorBasis& basis, double delta,
                                                    double J, const std::vector<double>& fields) {
  const int L = basis.L;
  if (static_cast<int>(fields.size()) != L)
    throw config_error("build_sector_hamiltonian: field count must equal L");
  const int d = basis.dim();
  ManyBodyHamiltonian mb;
  mb.basis = &basis;
  mb.H = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    const std::uint32_t s = basis.states[a];
    double diag = 0.0;
    for (int i = 0; i < L; ++i) {
      const double szi = (s >> i & 1u) ? 0.5 : -0.5;
      diag += fields[i] * szi;
      if (i + 1 < L) {
        const double szj = (s >> (i + 1) & 1u) ? 0.5 : -0.5;
        diag += J * delta * szi * szj;
        if (((s >> i & 1u) ^ (s >> (i + 1) & 1u)) != 0) {
          const std::uint32_t flipped = s ^ (3u << i);
          const int bidx = basis.index_of(flipped);
          mb.H(bidx, a) = J / 2.0;
        }
      }
    }
    mb.H(a, a) = diag;
  }
  return mb;
}

struct SpectralMB {
  Eigen::VectorXd w;  // ascending
  Eigen::MatrixXd P;
};

inline SpectralMB decompose_mb(const ManyBodyHamiltonian& mb) {
  SpectralMB out;
#ifdef FPOT_USE_LAPACKE
  out.P = mb.H;
  out.w.resize(mb.H.rows());
  const lapack_int n = static_cast<lapack_int>(mb.H.rows());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.P.data(), n, out.w.data());
  if (info != 0)
    throw numeric_error("dsyevd failed with info " + std::to_string(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mb.H);
  if (solver.info() != Eigen::Success) throw numeric_error("many-body eigensolve failed");
  out.w = solver.eigenvalues();
  out.P = solver.eigenvectors();
#endif
  return out;
}

struct GroundState {
  Eigen::VectorXd vec;
  double energy = 0.0;
  bool degenerate = false;  // gap below 1e-10; flagged, not fatal
};

inline GroundState ground_state(const ManyBodyHamiltonian& mb) {
  const SpectralMB s = decompose_mb(mb);
  GroundState gs;
  gs.energy = s.w(0);
  gs.vec = s.P.col(0);
  gs.degenerate = s.w.size() > 1 && (s.w(1) - s.w(0)) < 1e-10;
  for (Eigen::Index i = 0; i < gs.vec.size(); ++i) {
    if (std::abs(gs.vec(i)) > 1e-12) {
      if (gs.vec(i) < 0) gs.vec = -gs.vec;
      break;
    }
  }
  return gs;
}

// Z(T) = <gs| e^{-i H_U T} e^{+i H_V T} |gs> through both spectral bases:
// z = sum_mn a_m e^{-i wU_m T} G_mn e^{+i wV_n T} b_n with a = PU^T gs,
// b = PV^T gs, G = PU^T PV. O(d^2) per time point after O(d^3) setup.
struct MbOverlapWorkspace {
  Eigen::VectorXd a, b, wU, wV;
  Eigen::MatrixXd G;

  MbOverlapWorkspace(const Eigen::VectorXd& gs, const SpectralMB& U, const SpectralMB& V)
      : a(U.P.transpose() * gs), b(V.P.transpose() * gs), wU(U.w), wV(V.w),
        G(U.P.transpose() * V.P) {}

  Complex z_at(double T) const {
    const Eigen::ArrayXd phase_v = wV.array() * T;
    const Eigen::VectorXd bc = (b.array() * phase_v.cos()).matrix();
    const Eigen::VectorXd bs = (b.array() * phase_v.sin()).matrix();
    const Eigen::VectorXd re = G * bc;
    const Eigen::VectorXd im = G * bs;
    const Eigen::ArrayXd phase_u = wU.array() * T;
    const Eigen::ArrayXd cu = phase_u.cos(), su = phase_u.sin();
    // a^T diag(e^{-i wU T}) (re + i im)
    const double zr = (a.array() * (cu * re.array() + su * im.array())).sum();
    const double zi = (a.array() * (cu * im.array() - su * re.array())).sum();
    return {zr, zi};
  }
};

inline Complex overlap_z_manybody(const GroundState& gs, const ManyBodyHamiltonian& hU,
                                  const ManyBodyHamiltonian& hV, double T) {
  if (hU.basis != hV.basis) throw config_error("overlap_z_manybody: mismatched sector bases");
  return MbOverlapWorkspace(gs.vec, decompose_mb(hU), decompose_mb(hV)).z_at(T);
}

struct MbEstimateParams {
  int L = 0;
  double delta = 0.0;
  double J = 1.0;
  double sigma_h = 0.0;
  int filter_order = 1;
  int k_max = 1;
  std::vector<double> times;
  int n_dis = 2;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

// Same estimator contract as freefermion::estimate_fp; rho is the clean
// ground state (disorder enters only the evolution operators).
inline FpCurve estimate_fp_interacting(const MbEstimateParams& prm,
                                       std::vector<std::vector<double>>* absz_out = nullptr) {
  if (prm.n_dis < 2) throw config_error("estimate_fp_interacting: n_dis must be >= 2");
  if (prm.k_max < 1) throw config_error("estimate_fp_interacting: k_max must be >= 1");
  if (prm.times.empty()) throw config_error("estimate_fp_interacting: empty time grid");
  const SectorBasis basis = make_sector_basis(prm.L);
  const GroundState gs = ground_state(
      build_sector_hamiltonian(basis, prm.delta, prm.J, std::vector<double>(prm.L, 0.0)));

  std::vector<std::vector<double>> absz(prm.n_dis);
  parallel_for_indexed(prm.n_dis, prm.workers, [&](int r) {
    const auto fU = make_realization(prm.L, prm.sigma_h, prm.filter_order, prm.master_seed, r, 0, 0);
    const auto fV = make_realization(prm.L, prm.sigma_h, prm.filter_order, prm.master_seed, r, 1, 0);
    const SpectralMB sU = decompose_mb(build_sector_hamiltonian(basis, prm.delta, prm.J, fU.values));
    const SpectralMB sV = decompose_mb(build_sector_hamiltonian(basis, prm.delta, prm.J, fV.values));
    const MbOverlapWorkspace ws(gs.vec, sU, sV);
    std::vector<double>& row = absz[r];
    row.resize(prm.times.size());
    for (size_t it = 0; it < prm.times.size(); ++it) {
      const double a = std::abs(ws.z_at(prm.times[it]));
      if (a > 1.0 + 1e-8)
        throw numeric_error("overlap |Z| > 1 at realization " + std::to_string(r));
      row[it] = std::min(a, 1.0);
    }
  });

  FpCurve curve = detail::reduce_absz(prm.times, prm.k_max, prm.n_dis, absz);
  if (absz_out) *absz_out = std::move(absz);
  return curve;
}

}  // namespace fpot
