#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fpot/run.hpp"

using namespace fpot;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "fpot_io_test";
  fs::create_directories(d);
  return d;
}

const char* kAnalyticCfg =
    "# comment line\n"
    "engine = analytic\n"
    "L = 32\n"
    "delta = 0\n"
    "J = 1\n"
    "sigma_h = 0.05\n"
    "filter_order = 1\n"
    "beta = inf\n"
    "k_max = 2\n"
    "t_max = 10\n"
    "dt = 2.5\n"
    "master_seed = 3\n"
    "schedule = 1\n"
    "alpha = 0.08\n"
    "output = OUTPUT\n"
    "workers = 1\n";

std::string analytic_cfg(const std::string& output) {
  std::string s = kAnalyticCfg;
  s.replace(s.find("OUTPUT"), 6, output);
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FPOT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("fnv1a64 reference vectors", "[io]") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("hello", 5) == 0xa430d84680aabd0bULL);
  CHECK(fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("curve CSV round trip is exact", "[io]") {
  FpCurve c;
  c.times = {0.0, 1.0 / 3.0, 0.7071067811865476};
  c.k_max = 2;
  c.n_dis = 7;
  c.mean = {{1.0, 0.9123456789012345, 0.5}, {1.0, 0.8323456789012345, 0.25}};
  c.stderr_ = {{0.0, 1e-3, 2.5e-4}, {0.0, 2e-3, 5e-4}};
  c.validate();

  const FpCurve back = curve_from_csv(curve_to_csv(c));
  CHECK(back.times == c.times);
  CHECK(back.k_max == c.k_max);
  CHECK(back.n_dis == c.n_dis);
  CHECK(back.mean == c.mean);
  CHECK(back.stderr_ == c.stderr_);
}

TEST_CASE("curve CSV parser rejects malformed input", "[io]") {
  CHECK_THROWS_AS(curve_from_csv(""), io_error);
  CHECK_THROWS_AS(curve_from_csv("T,k,R\n"), io_error);
  const std::string h = std::string(kCsvHeader) + "\n";
  CHECK_THROWS_AS(curve_from_csv(h + "not,a,row,at,all\n"), io_error);
  CHECK_THROWS_AS(curve_from_csv(h + "0,0,1,0,5\n"), io_error);
  CHECK_THROWS_AS(curve_from_csv(h + "1,1,1,0,5\n0.5,1,1,0,5\n2,1,1,0,5\n"), io_error);
  // validation still applies to parsed content
  CHECK_THROWS_AS(curve_from_csv(h + "0,1,2.5,0,5\n"), numeric_error);
}

TEST_CASE("atomic write leaves no staging file", "[io]") {
  const fs::path p = temp_dir() / "atomic.txt";
  atomic_write(p, "payload\n");
  CHECK(read_file(p) == "payload\n");
  CHECK_FALSE(fs::exists(p.string() + ".partial"));
  CHECK_THROWS_AS(read_file(temp_dir() / "missing.txt"), io_error);

  // recipes point at not-yet-existing output directories
  const fs::path nested = temp_dir() / "fresh_dir" / "deep" / "atomic.txt";
  fs::remove_all(temp_dir() / "fresh_dir");
  atomic_write(nested, "x\n");
  CHECK(read_file(nested) == "x\n");
}

TEST_CASE("config parse and canonical serialization", "[io]") {
  const ExperimentConfig cfg = parse_config(analytic_cfg("a.csv"));
  CHECK(cfg.engine == "analytic");
  CHECK(cfg.L == 32);
  CHECK(is_infinite_beta(cfg.beta));
  CHECK(cfg.alpha == 0.08);
  CHECK(cfg.schedule == std::vector<double>{1.0});

  // serialize(parse(.)) is a fixed point
  const std::string canon = serialize_config(cfg);
  CHECK(serialize_config(parse_config(canon)) == canon);
}

TEST_CASE("config rejects malformed and inconsistent input", "[io]") {
  auto mutate = [](std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  const std::string base = analytic_cfg("a.csv");

  CHECK_THROWS_AS(parse_config(base + "engine = analytic\n"), config_error);  // duplicate
  CHECK_THROWS_AS(parse_config(base + "mystery = 1\n"), config_error);        // unknown key
  CHECK_THROWS_AS(parse_config(mutate(base, "engine = analytic", "engine = tebd")), config_error);
  CHECK_THROWS_AS(parse_config(mutate(base, "sigma_h = 0.05", "sigma_h = -1")), config_error);
  // analytic runs take no n_dis; microscopic runs require it
  CHECK_THROWS_AS(parse_config(base + "n_dis = 10\n"), config_error);
  CHECK_THROWS_AS(
      parse_config(mutate(mutate(base, "engine = analytic", "engine = freefermion"),
                          "alpha = 0.08\n", "")),
      config_error);
  // manybody is capped at L = 14 and freefermion demands delta = 0
  std::string mb = mutate(base, "engine = analytic", "engine = manybody");
  mb = mutate(mb, "alpha = 0.08\n", "");
  mb += "n_dis = 4\n";
  CHECK_NOTHROW(parse_config(mutate(mb, "L = 32", "L = 12")));
  CHECK_THROWS_AS(parse_config(mb), config_error);
  std::string ff = mutate(base, "engine = analytic", "engine = freefermion");
  ff = mutate(ff, "alpha = 0.08\n", "");
  ff += "n_dis = 4\n";
  CHECK_NOTHROW(parse_config(ff));
  CHECK_THROWS_AS(parse_config(mutate(ff, "delta = 0\n", "delta = 0.5\n")), config_error);
}

TEST_CASE("time grid construction", "[io]") {
  ExperimentConfig cfg = parse_config(analytic_cfg("a.csv"));
  CHECK(cfg.time_grid() == std::vector<double>{0.0, 2.5, 5.0, 7.5, 10.0});
  cfg.t_max = 1.0;
  cfg.dt = 0.3;
  const auto grid = cfg.time_grid();
  REQUIRE(grid.size() == 4);
  CHECK(grid[3] == Catch::Approx(0.9));
}

TEST_CASE("run writes curve, manifest, and stable checksums", "[io]") {
  const fs::path dir = temp_dir();
  const std::string out = (dir / "run_a.csv").string();
  const ExperimentConfig cfg = parse_config(analytic_cfg(out));

  const RunResult r1 = run(cfg);
  const std::string csv1 = read_file(r1.csv_path);
  const RunResult r2 = run(cfg);
  CHECK(read_file(r2.csv_path) == csv1);

  const auto m1 = nlohmann::json::parse(read_file(r1.manifest_path));
  CHECK(m1.at("version").get<std::string>() == kVersion);
  CHECK(m1.at("outputs").at("run_a.csv").get<std::string>() == fnv1a64_hex(csv1));
  CHECK(m1.at("config").at("engine").get<std::string>() == "analytic");

  // loading restores the config echo through the sidecar
  const FpCurve loaded = load_curve(r1.csv_path);
  CHECK(loaded.label() == "run_a");
  CHECK(loaded.meta_num("L") == 32.0);
  const ModelParams mp = model_params_from_meta(loaded);
  CHECK(mp.sigma_h == 0.05);
  CHECK(is_infinite_beta(mp.beta));
}

TEST_CASE("zero coupling gives the identity curve", "[io]") {
  ExperimentConfig cfg = parse_config(analytic_cfg("unused.csv"));
  cfg.sigma_h = 0.0;
  const FpCurve curve = compute_curve(cfg);
  for (int k = 0; k < curve.k_max; ++k)
    for (double v : curve.mean[k]) CHECK(v == 1.0);
}

TEST_CASE("cli exit codes", "[io]") {
  const fs::path dir = temp_dir();
  const std::string cfg_path = (dir / "cli_a.cfg").string();
  const std::string out = (dir / "cli_a.csv").string();
  atomic_write(cfg_path, analytic_cfg(out));

  CHECK(run_cli("run " + cfg_path) == 0);
  CHECK(run_cli("run " + (dir / "no_such.cfg").string()) == 4);
  CHECK(run_cli("revival " + (dir / "no_such.csv").string()) == 4);

  const std::string bad_cfg = (dir / "cli_bad.cfg").string();
  atomic_write(bad_cfg, analytic_cfg(out) + "mystery = 1\n");
  CHECK(run_cli("run " + bad_cfg) == 2);
  CHECK(run_cli("frobnicate") == 2);

  // window outside the data is a config error
  CHECK(run_cli("compare " + out + " " + cfg_path + " --window 900,950") == 2);
  CHECK(run_cli("compare " + out + " " + cfg_path + " --window nonsense") == 2);
}
