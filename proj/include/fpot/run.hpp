#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "fpot/analysis.hpp"
#include "fpot/analytic.hpp"
#include "fpot/config.hpp"
#include "fpot/curve.hpp"
#include "fpot/freefermion.hpp"
#include "fpot/manybody.hpp"
#include "fpot/model.hpp"
#include "json.hpp"

namespace fpot {

// Pure computation half of a run: config -> curve, no I/O.
inline FpCurve compute_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> times = cfg.time_grid();
  const int workers = resolve_workers(cfg.workers);
  FpCurve curve;

  if (cfg.engine == "analytic") {
    const ModelParams mp{cfg.delta, cfg.J, cfg.sigma_h, cfg.beta};
    const LuttingerParams lp = luttinger_params(mp);
    const ModeGrid grid(cfg.L, cfg.alpha);
    curve.times = times;
    curve.k_max = cfg.k_max;
    curve.n_dis = 0;
    curve.mean.assign(cfg.k_max, std::vector<double>(times.size(), 0.0));
    curve.stderr_.assign(cfg.k_max, std::vector<double>(times.size(), 0.0));
    QuenchSchedule sched;
    sched.durations.resize(cfg.schedule.size());
    for (size_t it = 0; it < times.size(); ++it) {
      for (size_t j = 0; j < cfg.schedule.size(); ++j)
        sched.durations[j] = cfg.schedule[j] * times[it];
      for (int k = 1; k <= cfg.k_max; ++k)
        curve.mean[k - 1][it] =
            std::exp(multiquench_log_ratio(grid, lp.g, lp.u, cfg.beta, k, sched));
    }
  } else if (cfg.engine == "freefermion") {
    FfEstimateParams prm;
    prm.L = cfg.L;
    prm.J = cfg.J;
    prm.sigma_h = cfg.sigma_h;
    prm.filter_order = cfg.filter_order;
    prm.k_max = cfg.k_max;
    prm.times = times;
    prm.n_dis = cfg.n_dis;
    prm.master_seed = cfg.master_seed;
    prm.schedule_weights = cfg.schedule;
    prm.workers = workers;
    curve = estimate_fp(prm);
  } else {
    MbEstimateParams prm;
    prm.L = cfg.L;
    prm.delta = cfg.delta;
    prm.J = cfg.J;
    prm.sigma_h = cfg.sigma_h;
    prm.filter_order = cfg.filter_order;
    prm.k_max = cfg.k_max;
    prm.times = times;
    prm.n_dis = cfg.n_dis;
    prm.master_seed = cfg.master_seed;
    prm.workers = workers;
    curve = estimate_fp_interacting(prm);
  }

  curve.meta = config_echo(cfg);
  curve.meta["label"] = std::filesystem::path(cfg.output).stem().string();
  return curve;
}

struct RunResult {
  FpCurve curve;
  std::filesystem::path csv_path;
  std::filesystem::path manifest_path;
};

// Full run: compute, then persist CSV plus a JSON manifest sidecar. Both
// writes are atomic (staging name + rename).
inline RunResult run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.curve = compute_curve(cfg);
  res.csv_path = cfg.output;
  res.manifest_path = cfg.output + ".manifest.json";

  const std::string csv = curve_to_csv(res.curve);
  atomic_write(res.csv_path, csv);

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  nlohmann::json config_obj;
  for (const auto& [key, value] : config_echo(cfg)) config_obj[key] = value;
  manifest["config"] = config_obj;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["outputs"] = {{res.csv_path.filename().string(), fnv1a64_hex(csv)}};
  atomic_write(res.manifest_path, manifest.dump(2) + "\n");
  return res;
}

struct CompareResult {
  AlphaFit fit;
  std::string overlay_csv;  // T,k,R_num,R_analytic rows over the full grid
};

// k=1 cutoff fit plus a per-(T,k) overlay of numerics against Eq. 9 at the
// fitted alpha. The analytic side is exact at any T, so mismatched grids are
// handled by evaluating it on the numerical grid.
inline CompareResult compare_curve(const FpCurve& curve, const ModelParams& mp, int L,
                                   double window_lo, double window_hi) {
  CompareResult res;
  res.fit = fit_alpha(curve, mp, L, window_lo, window_hi);
  const LuttingerParams lp = luttinger_params(mp);
  const ModeGrid grid(L, res.fit.alpha);
  std::string out = "T,k,R_num,R_analytic\n";
  for (size_t it = 0; it < curve.times.size(); ++it)
    for (int k = 1; k <= curve.k_max; ++k) {
      out += detail::fmt_full(curve.times[it]);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += detail::fmt_full(curve.mean[k - 1][it]);
      out += ',';
      out += detail::fmt_full(std::exp(log_fp_ratio(grid, lp.g, lp.u, mp.beta, k, curve.times[it])));
      out += '\n';
    }
  res.overlay_csv = out;
  return res;
}

inline ModelParams model_params_from_meta(const FpCurve& curve) {
  ModelParams mp;
  mp.delta = curve.meta_num("delta");
  mp.J = curve.meta_num("J");
  mp.sigma_h = curve.meta_num("sigma_h");
  auto it = curve.meta.find("beta");
  mp.beta = (it == curve.meta.end() || it->second == "inf") ? kBetaInfinite : std::stod(it->second);
  return mp;
}

}  // namespace fpot
