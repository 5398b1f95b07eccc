// Batch front-end over the frame-potential toolkit: deterministic runs from
// key=value configs plus the post-processing verbs used by the figure
// pipelines. Exit codes: 0 ok, 2 config error, 3 numerical error, 4 I/O.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpot/analysis.hpp"
#include "fpot/config.hpp"
#include "fpot/curve.hpp"
#include "fpot/model.hpp"
#include "fpot/run.hpp"

namespace {

fpot::ExperimentConfig load_config(const std::string& path) {
  return fpot::parse_config(fpot::read_file(path));
}

std::pair<double, double> parse_window(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw fpot::config_error("window must be 'lo,hi', got: " + spec);
  try {
    return {std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
  } catch (...) {
    throw fpot::config_error("window must be 'lo,hi', got: " + spec);
  }
}

int run_verb(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  const auto res = fpot::run(cfg);
  std::printf("wrote %s (%zu time points, k_max=%d)\n", res.csv_path.string().c_str(),
              res.curve.times.size(), res.curve.k_max);
  std::printf("manifest %s\n", res.manifest_path.string().c_str());
  return 0;
}

int compare_verb(const std::string& curve_path, const std::string& config_path,
                 const std::string& window) {
  const auto [lo, hi] = parse_window(window);
  const auto cfg = load_config(config_path);
  const fpot::FpCurve curve = fpot::load_curve(curve_path);
  const fpot::ModelParams mp{cfg.delta, cfg.J, cfg.sigma_h, cfg.beta};
  const auto res = fpot::compare_curve(curve, mp, cfg.L, lo, hi);
  const std::string overlay_path = curve_path + ".overlay.csv";
  fpot::atomic_write(overlay_path, res.overlay_csv);
  std::printf("alpha = %.6f  mse = %.6e  window = [%g, %g]%s%s\n", res.fit.alpha, res.fit.mse, lo,
              hi, res.fit.at_boundary ? "  [boundary]" : "",
              res.fit.degenerate ? "  [degenerate]" : "");
  std::printf("overlay %s\n", overlay_path.c_str());
  return 0;
}

int collapse_verb(const std::vector<std::string>& curve_paths, const std::string& window,
                  double fraction, double t_cut, const std::string& output) {
  const auto [lo, hi] = parse_window(window);
  std::string out = "curve_id,alpha,mse,k,plateau,plateau_err,collapse_x,collapse_y\n";
  for (const auto& path : curve_paths) {
    fpot::FpCurve curve = fpot::load_curve(path);
    const fpot::ModelParams mp = fpot::model_params_from_meta(curve);
    const int L = static_cast<int>(curve.meta_num("L"));
    const auto fit = fpot::fit_alpha(curve, mp, L, lo, hi);
    if (t_cut > 0) curve = fpot::truncate_curve(curve, t_cut);
    const auto plateaus = fpot::extract_plateau(curve, fraction);
    const double g = fpot::luttinger_params(mp).g;
    for (const auto& pt : fpot::collapse_points(plateaus, fit, g, curve.label())) {
      char row[256];
      std::snprintf(row, sizeof row, "%s,%.10g,%.6e,%d,%.10g,%.3g,%.10g,%.10g\n",
                    pt.curve_id.c_str(), fit.alpha, fit.mse, pt.k,
                    plateaus[pt.k - 1].ln_r, plateaus[pt.k - 1].err, pt.x, pt.y);
      out += row;
    }
  }
  fpot::atomic_write(output, out);
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int revival_verb(const std::string& curve_path) {
  const fpot::FpCurve curve = fpot::load_curve(curve_path);
  const fpot::ModelParams mp = fpot::model_params_from_meta(curve);
  const int L = static_cast<int>(curve.meta_num("L"));
  double u = 0.0, K = 0.0;
  fpot::bethe_params(mp.delta, mp.J, u, K);
  const auto det = fpot::detect_revival(curve, L, u);
  if (det.degenerate) std::printf("degenerate: curve never decays below threshold\n");
  else if (det.found)
    std::printf("revival at T = %g (dip %.4f at threshold %.4f, estimate 2L/u = %g)\n", det.t,
                det.dip, det.threshold_used, 2.0 * L / u);
  else std::printf("no revival in range (dip %.4f)\n", det.dip);
  return 0;
}

int slope_verb(const std::vector<std::string>& curve_paths, double fraction) {
  // One curve per quench count m; m is read back from the schedule echo.
  std::vector<double> m_values;
  std::vector<std::vector<fpot::PlateauPoint>> plateaus;
  int k_max = 0;
  for (const auto& path : curve_paths) {
    const fpot::FpCurve curve = fpot::load_curve(path);
    const auto it = curve.meta.find("schedule");
    if (it == curve.meta.end()) throw fpot::config_error("curve lacks schedule metadata: " + path);
    m_values.push_back(1.0 + std::count(it->second.begin(), it->second.end(), ','));
    plateaus.push_back(fpot::extract_plateau(curve, fraction));
    k_max = std::max(k_max, curve.k_max);
  }
  std::printf("k,slope,residual_norm\n");
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> y;
    for (const auto& p : plateaus) y.push_back(p[k - 1].ln_r);
    const auto fit = fpot::multiquench_slope(m_values, y);
    std::printf("%d,%.10g,%.3e\n", k, fit.slope, fit.residual_norm);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame-potential toolkit"};
  app.require_subcommand(1);

  std::string config_path, curve_path, window = "10,50", output = "collapse.csv";
  std::vector<std::string> curve_paths;
  double fraction = 0.10, t_cut = 0.0;

  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  run_cmd->add_option("config", config_path, "config file")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "fit alpha and emit an overlay table");
  cmp_cmd->add_option("curve", curve_path, "curve CSV")->required();
  cmp_cmd->add_option("config", config_path, "config file with model parameters")->required();
  cmp_cmd->add_option("--window", window, "fit window 'lo,hi'");

  auto* col_cmd = app.add_subcommand("collapse", "plateau collapse coordinates");
  col_cmd->add_option("curves", curve_paths, "curve CSVs")->required();
  col_cmd->add_option("--window", window, "alpha fit window 'lo,hi'");
  col_cmd->add_option("--fraction", fraction, "plateau fraction of the grid");
  col_cmd->add_option("--t-cut", t_cut, "truncate curves at this time first");
  col_cmd->add_option("--output", output, "analysis CSV path");

  auto* rev_cmd = app.add_subcommand("revival", "detect the finite-size revival");
  rev_cmd->add_option("curve", curve_path, "curve CSV")->required();

  auto* slope_cmd = app.add_subcommand("slope", "multi-quench plateau slope vs m");
  slope_cmd->add_option("curves", curve_paths, "curve CSVs, one per m")->required();
  slope_cmd->add_option("--fraction", fraction, "plateau fraction of the grid");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return run_verb(config_path);
    if (cmp_cmd->parsed()) return compare_verb(curve_path, config_path, window);
    if (col_cmd->parsed()) return collapse_verb(curve_paths, window, fraction, t_cut, output);
    if (rev_cmd->parsed()) return revival_verb(curve_path);
    if (slope_cmd->parsed()) return slope_verb(curve_paths, fraction);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const fpot::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const fpot::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const fpot::numeric_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
  return 0;
}
