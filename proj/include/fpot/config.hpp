#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fpot/common.hpp"

namespace fpot {

// Flat key=value experiment description, one file per run. '#' starts a
// comment; keys are fixed and typos are rejected rather than ignored.
struct ExperimentConfig {
  std::string engine;  // analytic | freefermion | manybody
  int L = 0;
  double delta = 0.0;
  double J = 1.0;
  double sigma_h = 0.0;
  int filter_order = 1;
  double beta = kBetaInfinite;
  int k_max = 1;
  double t_max = 0.0;
  double dt = 0.0;
  int n_dis = 0;  // 0 means unset; required >= 2 for microscopic engines
  std::uint64_t master_seed = 0;
  std::vector<double> schedule{1.0};  // per-segment duration weights, scanned as weight * T
  double alpha = -1.0;                // analytic engine only; -1 means unset
  std::string output;
  int workers = 1;

  void validate() const {
    if (engine != "analytic" && engine != "freefermion" && engine != "manybody")
      throw config_error("engine must be analytic, freefermion or manybody");
    if (L < 1) throw config_error("L must be >= 1");
    if (!(J > 0)) throw config_error("J must be positive");
    if (!(sigma_h >= 0)) throw config_error("sigma_h must be >= 0");
    if (filter_order < 0 || filter_order > 30) throw config_error("filter_order out of range");
    if (k_max < 1) throw config_error("k_max must be >= 1");
    if (!(t_max > 0) || !(dt > 0)) throw config_error("need t_max > 0 and dt > 0");
    if (dt > t_max) throw config_error("dt larger than t_max");
    if (output.empty()) throw config_error("output path required");
    if (workers < 1 || workers > 64) throw config_error("workers must be in [1, 64]");
    if (schedule.empty()) throw config_error("schedule must hold at least one weight");
    for (double w : schedule)
      if (!(w >= 0)) throw config_error("schedule weights must be >= 0");
    if (!(std::abs(delta) < 1.0)) throw config_error("delta outside the gapless phase");
    if (!(beta > 0)) throw config_error("beta must be positive or infinite");

    if (engine == "analytic") {
      if (n_dis != 0) throw config_error("analytic engine takes no n_dis");
      if (!(alpha >= 0)) throw config_error("analytic engine requires alpha >= 0");
    } else {
      if (alpha >= 0) throw config_error("alpha is only meaningful for the analytic engine");
      if (!is_infinite_beta(beta))
        throw config_error("microscopic engines require beta = inf (ground state)");
      if (n_dis < 2) throw config_error("microscopic engines require n_dis >= 2");
    }
    if (engine == "freefermion") {
      if (delta != 0.0) throw config_error("freefermion engine requires delta = 0");
      if (L % 2 != 0) throw config_error("freefermion engine requires even L");
    }
    if (engine == "manybody") {
      if (L > 14) throw config_error("manybody engine caps L at 14");
      if (L % 2 != 0) throw config_error("manybody engine requires even L");
      if (schedule.size() != 1 || schedule[0] != 1.0)
        throw config_error("manybody engine supports the single-quench schedule only");
    }
  }

  std::vector<double> time_grid() const {
    const int n = static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1;
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = i * dt;
    return times;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_beta(const std::string& v) {
  if (v == "inf" || v == "infinite") return kBetaInfinite;
  try {
    return std::stod(v);
  } catch (...) {
    throw config_error("bad beta value: " + v);
  }
}

// Shortest decimal that round-trips to the same double.
inline std::string format_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (seen[key]) throw config_error("duplicate key: " + key);
    seen[key] = true;
    try {
      if (key == "engine") cfg.engine = val;
      else if (key == "L") cfg.L = std::stoi(val);
      else if (key == "delta") cfg.delta = std::stod(val);
      else if (key == "J") cfg.J = std::stod(val);
      else if (key == "sigma_h") cfg.sigma_h = std::stod(val);
      else if (key == "filter_order") cfg.filter_order = std::stoi(val);
      else if (key == "beta") cfg.beta = detail::parse_beta(val);
      else if (key == "k_max") cfg.k_max = std::stoi(val);
      else if (key == "t_max") cfg.t_max = std::stod(val);
      else if (key == "dt") cfg.dt = std::stod(val);
      else if (key == "n_dis") cfg.n_dis = std::stoi(val);
      else if (key == "master_seed") cfg.master_seed = std::stoull(val);
      else if (key == "alpha") cfg.alpha = std::stod(val);
      else if (key == "output") cfg.output = val;
      else if (key == "workers") cfg.workers = std::stoi(val);
      else if (key == "schedule") {
        cfg.schedule.clear();
        std::istringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.schedule.push_back(std::stod(detail::trim(item)));
      } else {
        throw config_error("unknown key: " + key);
      }
    } catch (const config_error&) {
      throw;
    } catch (...) {
      throw config_error("line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

// Canonical serialization; parse(serialize(cfg)) is the identity, so the
// round trip in the other direction is idempotent.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "engine = " << cfg.engine << '\n';
  out << "L = " << cfg.L << '\n';
  out << "delta = " << detail::format_num(cfg.delta) << '\n';
  out << "J = " << detail::format_num(cfg.J) << '\n';
  out << "sigma_h = " << detail::format_num(cfg.sigma_h) << '\n';
  out << "filter_order = " << cfg.filter_order << '\n';
  if (is_infinite_beta(cfg.beta)) out << "beta = inf\n";
  else out << "beta = " << detail::format_num(cfg.beta) << '\n';
  out << "k_max = " << cfg.k_max << '\n';
  out << "t_max = " << detail::format_num(cfg.t_max) << '\n';
  out << "dt = " << detail::format_num(cfg.dt) << '\n';
  if (cfg.n_dis != 0) out << "n_dis = " << cfg.n_dis << '\n';
  out << "master_seed = " << cfg.master_seed << '\n';
  out << "schedule = ";
  for (size_t i = 0; i < cfg.schedule.size(); ++i)
    out << (i ? "," : "") << detail::format_num(cfg.schedule[i]);
  out << '\n';
  if (cfg.alpha >= 0) out << "alpha = " << detail::format_num(cfg.alpha) << '\n';
  out << "output = " << cfg.output << '\n';
  out << "workers = " << cfg.workers << '\n';
  return out.str();
}

// Config echo for manifests and curve metadata: canonical key/value pairs.
inline std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> echo;
  std::istringstream in(serialize_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    echo[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return echo;
}

}  // namespace fpot
