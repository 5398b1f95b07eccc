#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fpot/analytic.hpp"
#include "fpot/common.hpp"
#include "fpot/curve.hpp"
#include "fpot/disorder.hpp"
#include "fpot/parallel.hpp"

namespace fpot {

// Jordan-Wigner image of the XXZ chain at delta = 0: tridiagonal hopping J/2
// with the filtered fields on the diagonal. The scalar -1/2 sum_i h~_i from
// S^z = n - 1/2 is dropped; it only shifts arg Z and cancels in |Z|^{2k}.
struct SingleParticleHamiltonian {
  int L = 0;
  Eigen::MatrixXd matrix;
};

inline SingleParticleHamiltonian build_hamiltonian(int L, double J,
                                                   const std::vector<double>& fields) {
  if (L < 2 || L % 2 != 0) throw config_error("build_hamiltonian: L must be even and >= 2");
  if (static_cast<int>(fields.size()) != L)
    throw config_error("build_hamiltonian: field count must equal L");
  SingleParticleHamiltonian h;
  h.L = L;
  h.matrix = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    h.matrix(i, i) = fields[i];
    if (i + 1 < L) {
      h.matrix(i, i + 1) = J / 2.0;
      h.matrix(i + 1, i) = J / 2.0;
    }
  }
  return h;
}

// Eigenpairs reused for every time point of a realization.
struct SpectralSP {
  Eigen::VectorXd w;
  Eigen::MatrixXd P;  // columns are eigenvectors, ascending eigenvalues
};

inline SpectralSP decompose(const SingleParticleHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw numeric_error("single-particle eigensolve did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

struct GroundStateOrbitals {
  Eigen::MatrixXd C;  // L x N, orthonormal columns, N = L/2
  bool fermi_degenerate = false;
};

// Half-filled Fermi sea of the clean chain (beta = inf ground state).
inline GroundStateOrbitals ground_state_orbitals(const SingleParticleHamiltonian& h0) {
  const int L = h0.L;
  const int N = L / 2;
  const SpectralSP s = decompose(h0);
  GroundStateOrbitals gs;
  gs.C = s.P.leftCols(N);
  gs.fermi_degenerate = std::abs(s.w(N - 1) - s.w(N)) < 1e-12;
  return gs;
}

namespace detail {

inline Eigen::VectorXcd phase_column(const Eigen::VectorXd& w, double t) {
  Eigen::VectorXcd ph(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) ph(i) = std::polar(1.0, w(i) * t);
  return ph;
}

// Mixed real*complex product as two real GEMMs (Eigen has no fused kernel).
inline Eigen::MatrixXcd real_times_complex(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows(), B.cols());
  out.real() = A * B.real();
  out.imag() = A * B.imag();
  return out;
}

}  // namespace detail

// Z = det(C' e^{-i hU T} e^{+i hV T} C) through the spectral factors:
// K = (AU^T D_U) (M (D_V AV)) with AX = PX^T C, M = PU^T PV,
// D_U = diag(e^{-i wU T}), D_V = diag(e^{+i wV T}).
struct OverlapWorkspace {
  Eigen::MatrixXd AU, AV, M;

  OverlapWorkspace(const Eigen::MatrixXd& C, const SpectralSP& U, const SpectralSP& V)
      : AU(U.P.transpose() * C), AV(V.P.transpose() * C), M(U.P.transpose() * V.P) {}

  Complex z_at(const Eigen::VectorXd& wU, const Eigen::VectorXd& wV, double T) const {
    const Eigen::VectorXcd dU = detail::phase_column(wU, -T);
    const Eigen::VectorXcd dV = detail::phase_column(wV, +T);
    const Eigen::MatrixXcd right = detail::real_times_complex(M, dV.asDiagonal() * AV);
    const Eigen::MatrixXcd left = dU.asDiagonal() * AU;  // (AU^T D_U)^T
    const Eigen::MatrixXcd K = left.transpose() * right;
    return K.partialPivLu().determinant();
  }
};

inline Complex overlap_z_spectral(const Eigen::MatrixXd& C, const SpectralSP& U,
                                  const SpectralSP& V, double T) {
  return OverlapWorkspace(C, U, V).z_at(U.w, V.w, T);
}

inline Complex overlap_z(const GroundStateOrbitals& gs, const SingleParticleHamiltonian& hU,
                         const SingleParticleHamiltonian& hV, double T) {
  if (!(T >= 0)) throw config_error("overlap_z: T must be >= 0");
  return overlap_z_spectral(gs.C, decompose(hU), decompose(hV), T);
}

// Multi-quench overlap per Eq. 11: W_X = e^{-i h_{X,m} T_m} ... e^{-i h_{X,1} T_1},
// Z = det(Y_U' Y_V) with Y_X = W_X^dagger C built by applying segments m..1.
inline Complex multiquench_overlap_z_spectral(
    const Eigen::MatrixXd& C, const std::vector<std::pair<SpectralSP, SpectralSP>>& segments,
    const QuenchSchedule& schedule) {
  schedule.validate();
  if (segments.size() != schedule.durations.size())
    throw config_error("multiquench overlap: segment/schedule count mismatch");
  Eigen::MatrixXcd YU = C.cast<Complex>(), YV = C.cast<Complex>();
  for (int j = static_cast<int>(segments.size()) - 1; j >= 0; --j) {
    const double Tj = schedule.durations[j];
    if (Tj == 0.0) continue;
    const auto& [U, V] = segments[j];
    YU = detail::real_times_complex(
        U.P, detail::phase_column(U.w, +Tj).asDiagonal() *
                 detail::real_times_complex(U.P.transpose(), YU));
    YV = detail::real_times_complex(
        V.P, detail::phase_column(V.w, +Tj).asDiagonal() *
                 detail::real_times_complex(V.P.transpose(), YV));
  }
  const Eigen::MatrixXcd K = YU.adjoint() * YV;
  return K.partialPivLu().determinant();
}

inline Complex multiquench_overlap_z(
    const GroundStateOrbitals& gs,
    const std::vector<std::pair<SingleParticleHamiltonian, SingleParticleHamiltonian>>& segments,
    const QuenchSchedule& schedule) {
  std::vector<std::pair<SpectralSP, SpectralSP>> spec;
  spec.reserve(segments.size());
  for (const auto& [hU, hV] : segments) spec.emplace_back(decompose(hU), decompose(hV));
  return multiquench_overlap_z_spectral(gs.C, spec, schedule);
}

struct FfEstimateParams {
  int L = 0;
  double J = 1.0;
  double sigma_h = 0.0;
  int filter_order = 1;
  int k_max = 1;
  std::vector<double> times;
  int n_dis = 2;
  std::uint64_t master_seed = 0;
  // Segment durations at grid time T are schedule_weights[j] * T; a single
  // weight of 1 is the plain quench.
  std::vector<double> schedule_weights{1.0};
  int workers = 1;
};

// Monte Carlo estimate of R^(k)(T) = E|Z|^{2k} (F(0) = 1 at beta = inf).
// Every k reuses the same |Z| samples. Optionally exposes the raw |Z| table.
inline FpCurve estimate_fp(const FfEstimateParams& prm,
                           std::vector<std::vector<double>>* absz_out = nullptr) {
  if (prm.n_dis < 2) throw config_error("estimate_fp: n_dis must be >= 2");
  if (prm.k_max < 1) throw config_error("estimate_fp: k_max must be >= 1");
  if (prm.times.empty()) throw config_error("estimate_fp: empty time grid");
  const int m = static_cast<int>(prm.schedule_weights.size());
  const bool single = (m == 1 && prm.schedule_weights[0] == 1.0);

  const GroundStateOrbitals gs =
      ground_state_orbitals(build_hamiltonian(prm.L, prm.J, std::vector<double>(prm.L, 0.0)));

  std::vector<std::vector<double>> absz(prm.n_dis);
  parallel_for_indexed(prm.n_dis, prm.workers, [&](int r) {
    std::vector<std::pair<SpectralSP, SpectralSP>> segs;
    segs.reserve(m);
    for (int j = 0; j < m; ++j) {
      const auto fU = make_realization(prm.L, prm.sigma_h, prm.filter_order, prm.master_seed, r, 0, j);
      const auto fV = make_realization(prm.L, prm.sigma_h, prm.filter_order, prm.master_seed, r, 1, j);
      segs.emplace_back(decompose(build_hamiltonian(prm.L, prm.J, fU.values)),
                        decompose(build_hamiltonian(prm.L, prm.J, fV.values)));
    }
    std::vector<double>& row = absz[r];
    row.resize(prm.times.size());
    auto record = [&](size_t it, Complex z) {
      const double a = std::abs(z);
      if (a > 1.0 + 1e-8)
        throw numeric_error("overlap |Z| > 1 at realization " + std::to_string(r));
      row[it] = std::min(a, 1.0);
    };
    if (single) {
      const OverlapWorkspace ws(gs.C, segs[0].first, segs[0].second);
      for (size_t it = 0; it < prm.times.size(); ++it)
        record(it, ws.z_at(segs[0].first.w, segs[0].second.w, prm.times[it]));
    } else {
      QuenchSchedule sched;
      sched.durations.resize(m);
      for (size_t it = 0; it < prm.times.size(); ++it) {
        for (int j = 0; j < m; ++j) sched.durations[j] = prm.schedule_weights[j] * prm.times[it];
        record(it, multiquench_overlap_z_spectral(gs.C, segs, sched));
      }
    }
  });

  FpCurve curve = detail::reduce_absz(prm.times, prm.k_max, prm.n_dis, absz);
  if (absz_out) *absz_out = std::move(absz);
  return curve;
}

}  // namespace fpot
