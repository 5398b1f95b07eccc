#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fpot/common.hpp"
#include "json.hpp"

namespace fpot {

// Disorder-averaged frame-potential ratio curve R^(k)(T), k = 1..k_max.
// n_dis = 0 marks an exact analytic curve (stderr identically zero).
struct FpCurve {
  std::vector<double> times;
  int k_max = 1;
  int n_dis = 0;
  std::vector<std::vector<double>> mean;     // [k-1][time index]
  std::vector<std::vector<double>> stderr_;  // same shape
  std::map<std::string, std::string> meta;   // config echo, carried into the manifest

  void validate() const {
    if (times.empty()) throw numeric_error("FpCurve: empty time grid");
    for (size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw numeric_error("FpCurve: times must strictly increase");
    if (static_cast<int>(mean.size()) != k_max || static_cast<int>(stderr_.size()) != k_max)
      throw numeric_error("FpCurve: per-k series count mismatch");
    for (int k = 0; k < k_max; ++k) {
      if (mean[k].size() != times.size() || stderr_[k].size() != times.size())
        throw numeric_error("FpCurve: series length mismatch");
      for (size_t i = 0; i < times.size(); ++i) {
        const double r = mean[k][i];
        if (!std::isfinite(r)) throw numeric_error("FpCurve: non-finite mean");
        if (r < 0.0 || r > 1.0 + 3.0 * stderr_[k][i] + 1e-12)
          throw numeric_error("FpCurve: mean outside [0, 1 + 3 stderr]");
      }
    }
  }

  double meta_num(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw config_error("curve metadata missing key: " + key);
    return std::stod(it->second);
  }

  std::string label() const {
    auto it = meta.find("label");
    return it == meta.end() ? std::string("curve") : it->second;
  }
};

// FNV-1a, used only as a content fingerprint in manifests (not cryptographic).
inline std::uint64_t fnv1a64(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(bytes.data(), bytes.size()));
  return buf;
}

namespace detail {

inline std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shared mean/stderr reduction for both microscopic engines:
// absz[r][it] -> per-(k, T) sample statistics of |Z|^{2k}. Index-ordered,
// so worker scheduling cannot change the output.
inline FpCurve reduce_absz(const std::vector<double>& times, int k_max, int n_dis,
                           const std::vector<std::vector<double>>& absz) {
  FpCurve curve;
  curve.times = times;
  curve.k_max = k_max;
  curve.n_dis = n_dis;
  curve.mean.assign(k_max, std::vector<double>(times.size(), 0.0));
  curve.stderr_.assign(k_max, std::vector<double>(times.size(), 0.0));
  std::vector<double> v(n_dis);
  for (size_t it = 0; it < times.size(); ++it)
    for (int k = 1; k <= k_max; ++k) {
      double sum = 0.0;
      for (int r = 0; r < n_dis; ++r) {
        const double z2 = absz[r][it] * absz[r][it];
        double p = 1.0;
        for (int j = 0; j < k; ++j) p *= z2;
        v[r] = p;
        sum += p;
      }
      const double mean = sum / n_dis;
      curve.mean[k - 1][it] = mean;
      if (n_dis > 1) {
        // Two-pass variance: the shifted form cancels catastrophically when
        // all samples sit near 1 (early times).
        double ss = 0.0;
        for (int r = 0; r < n_dis; ++r) ss += (v[r] - mean) * (v[r] - mean);
        curve.stderr_[k - 1][it] = std::sqrt(ss / (n_dis - 1) / n_dis);
      }
    }
  return curve;
}

}  // namespace detail

// Column contract consumed by `analysis` and external plotting.
inline constexpr const char* kCsvHeader = "T,k,R_mean,R_stderr,n_dis";

inline std::string curve_to_csv(const FpCurve& curve) {
  std::string out(kCsvHeader);
  out += '\n';
  for (size_t it = 0; it < curve.times.size(); ++it)
    for (int k = 1; k <= curve.k_max; ++k) {
      out += detail::fmt_full(curve.times[it]);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += detail::fmt_full(curve.mean[k - 1][it]);
      out += ',';
      out += detail::fmt_full(curve.stderr_[k - 1][it]);
      out += ',';
      out += std::to_string(curve.n_dis);
      out += '\n';
    }
  return out;
}

// All file output goes through a .partial staging name and a final rename,
// so an interrupted run never leaves an unmarked truncated file behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path staging = path.string() + ".partial";
  if (const auto dir = path.parent_path(); !dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
  }
  {
    std::ofstream f(staging, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + staging.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw io_error("write failed: " + staging.string());
  }
  std::error_code ec;
  std::filesystem::rename(staging, path, ec);
  if (ec) throw io_error("rename failed for " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline FpCurve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw io_error("curve CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw io_error("curve CSV: bad header '" + line + "'");
  FpCurve c;
  c.k_max = 0;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double T, mean, se;
    int k, nd;
    if (std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%d", &T, &k, &mean, &se, &nd) != 5)
      throw io_error("curve CSV: unparsable row " + std::to_string(row));
    if (k < 1) throw io_error("curve CSV: k < 1 at row " + std::to_string(row));
    if (c.times.empty() || T > c.times.back()) c.times.push_back(T);
    else if (T != c.times.back())
      throw io_error("curve CSV: times not grouped ascending at row " + std::to_string(row));
    if (k > c.k_max) {
      c.k_max = k;
      c.mean.resize(k);
      c.stderr_.resize(k);
    }
    c.mean[k - 1].push_back(mean);
    c.stderr_[k - 1].push_back(se);
    c.n_dis = nd;
  }
  c.validate();
  return c;
}

inline FpCurve load_curve(const std::filesystem::path& csv_path) {
  FpCurve c = curve_from_csv(read_file(csv_path));
  c.meta["label"] = csv_path.stem().string();
  // Sidecar manifest, when present, restores the config echo.
  const std::filesystem::path mf = csv_path.string() + ".manifest.json";
  if (std::filesystem::exists(mf)) {
    const nlohmann::json j = nlohmann::json::parse(read_file(mf));
    if (j.contains("config"))
      for (const auto& [key, value] : j.at("config").items())
        c.meta[key] = value.get<std::string>();
  }
  return c;
}

}  // namespace fpot
