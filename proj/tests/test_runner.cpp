#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mdev/runner.hpp"

using namespace mdev;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("mdev_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallConfig =
    "# tiny linear-model run\n"
    "model.name = linear-sin\n"
    "theta0 = 0\n"
    "theorems = T3\n"
    "schedule.eps = 0.05,0.02\n"
    "schedule.a = 1\n"
    "schedule.delta = 0.8\n"
    "schedule.lambda = 1\n"
    "alpha = 0.05\n"
    "mc.n_rep = 5000\n"
    "mc.seed = 777\n"
    "mc.grid_n = 64\n";

}  // namespace

TEST_CASE("validate_schedule accepts exactly the admissible exponents") {
  Schedule s;
  s.eps_list = {0.05, 0.02, 0.01};
  s.lambda = 1.0;
  s.delta = 0.8;  // 2/3 < 0.8 < 1
  CHECK(validate_schedule(s).empty());

  s.delta = 0.5;
  CHECK_FALSE(validate_schedule(s).empty());

  s.lambda = 0.5;
  s.delta = 0.79;  // 2/2.5 = 0.8 > 0.79
  CHECK_FALSE(validate_schedule(s).empty());
  s.delta = 0.81;
  CHECK(validate_schedule(s).empty());

  // boundary and list problems are reported with the offending epsilon
  s.lambda = 1.0;
  s.delta = 0.8;
  s.eps_list = {0.05, 0.05};
  const auto violations = validate_schedule(s);
  CHECK_FALSE(violations.empty());
  CHECK(violations.front().eps == 0.05);

  s.eps_list = {};
  CHECK_FALSE(validate_schedule(s).empty());
}

TEST_CASE("config parse, round trip, and validation") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kSmallConfig);
  CHECK(cfg.model_name == "linear-sin");
  CHECK(cfg.theorems.size() == 1);
  CHECK(cfg.schedule.eps_list == std::vector<double>{0.05, 0.02});
  CHECK(cfg.n_rep == 5000);
  cfg.validate();

  // flat-map round trip is the identity
  const ExperimentConfig again = ExperimentConfig::from_flat_map(cfg.to_flat_map());
  CHECK(again.to_flat_map() == cfg.to_flat_map());

  CHECK_THROWS_AS(ExperimentConfig::parse("nonsense line"), schema_error);
  CHECK_THROWS_AS(ExperimentConfig::parse("unknown.key = 1"), schema_error);
  ExperimentConfig bad = cfg;
  bad.schedule.delta = 0.5;
  CHECK_THROWS_AS(bad.validate(), schema_error);
  bad = cfg;
  bad.model_name = "unknown";
  CHECK_THROWS_AS(bad.validate(), schema_error);
  bad = cfg;
  bad.omega_kind = "cube";
  CHECK_THROWS_AS(bad.validate(), schema_error);
}

TEST_CASE("run_experiment writes CSV, sidecar, and plot scripts") {
  const fs::path dir = temp_dir("run");
  ExperimentConfig cfg = ExperimentConfig::parse(kSmallConfig);
  cfg.output_dir = (dir / "out").string();
  const RunResult res = run_experiment(cfg);
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(res.csv_path));
  REQUIRE(fs::exists(res.sidecar_path));
  CHECK(fs::exists(res.csv_path.parent_path() / "plot_T3.gnuplot"));

  const std::string csv = read_file(res.csv_path);
  std::stringstream ss(csv);
  std::string header;
  std::getline(ss, header);
  CHECK(header == kCsvHeader);
  int rows = 0;
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only

  // sidecar round-trips the effective config and carries its hash
  const auto sidecar = nlohmann::json::parse(read_file(res.sidecar_path));
  std::map<std::string, std::string> kv =
      sidecar["config"].get<std::map<std::string, std::string>>();
  const ExperimentConfig round = ExperimentConfig::from_flat_map(kv);
  CHECK(round.to_flat_map() == cfg.to_flat_map());
  CHECK(sidecar["config_sha256"].get<std::string>().size() == 64);
  CHECK(sidecar["seed"].get<std::uint64_t>() == cfg.seed);
  CHECK(sidecar.contains("wall_clock_seconds"));
}

TEST_CASE("reruns and worker counts give byte-identical CSV") {
  const fs::path dir = temp_dir("determinism");
  ExperimentConfig cfg = ExperimentConfig::parse(kSmallConfig);

  cfg.output_dir = (dir / "a").string();
  RunOverrides ov1;
  ov1.workers = 1;
  const RunResult r1 = run_experiment(cfg, ov1);

  cfg.output_dir = (dir / "b").string();
  const RunResult r2 = run_experiment(cfg, ov1);

  cfg.output_dir = (dir / "c").string();
  RunOverrides ov8;
  ov8.workers = 8;
  const RunResult r8 = run_experiment(cfg, ov8);

  const std::string csv1 = read_file(r1.csv_path);
  CHECK(csv1 == read_file(r2.csv_path));
  CHECK(csv1 == read_file(r8.csv_path));

  // a different seed changes the results
  RunOverrides ov_seed;
  ov_seed.seed = 778;
  cfg.output_dir = (dir / "d").string();
  const RunResult r_seed = run_experiment(cfg, ov_seed);
  CHECK(csv1 != read_file(r_seed.csv_path));
}

TEST_CASE("empty theorem selection yields a header-only CSV and exit 0") {
  const fs::path dir = temp_dir("empty");
  ExperimentConfig cfg = ExperimentConfig::parse(kSmallConfig);
  cfg.theorems.clear();
  cfg.output_dir = (dir / "out").string();
  const RunResult res = run_experiment(cfg);
  CHECK(res.exit_code == 0);
  CHECK(read_file(res.csv_path) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("emit_plots handles empty data and schema mismatches") {
  const fs::path dir = temp_dir("plots");
  const fs::path empty_csv = dir / "empty.csv";
  {
    std::ofstream out(empty_csv, std::ios::binary);
    out << kCsvHeader << "\n";
  }
  CHECK(emit_plots(empty_csv).empty());

  const fs::path bad_csv = dir / "bad.csv";
  {
    std::ofstream out(bad_csv, std::ios::binary);
    out << "not,the,schema\n";
  }
  CHECK_THROWS_AS(emit_plots(bad_csv), schema_error);

  const fs::path good_csv = dir / "good.csv";
  {
    std::ofstream out(good_csv, std::ios::binary);
    out << kCsvHeader << "\n";
    out << "T1,0.05,0.09,1.8,0.03,1e-2,1e-2,1e-2,2.0,1.9,0.01,true\n";
    out << "T2,0.05,0.09,1.8,NA,-0.5,-0.5,-0.5,-0.5,1.0,0.01,true\n";
  }
  const auto scripts = emit_plots(good_csv);
  REQUIRE(scripts.size() == 2);
  const std::string script = read_file(scripts[0]);
  CHECK(script.find("good.csv") != std::string::npos);
  CHECK(script.find("T1") != std::string::npos);
}

TEST_CASE("sha256 of a known vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
