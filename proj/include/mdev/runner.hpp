#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdev/config.hpp"
#include "mdev/mdp.hpp"

namespace mdev {

// Optional command-line overrides for a config-file run.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 bound violation or cell failure
  std::filesystem::path csv_path;
  std::filesystem::path sidecar_path;
  std::vector<BoundReport> reports;
};

// Fixed CSV schema shared by the runner and the plot emitter.
extern const char* const kCsvHeader;

std::string report_csv_row(const BoundReport& rep);
std::string reports_to_csv(const std::vector<BoundReport>& reports);

// Executes the configured comparisons, writes results.csv plus the JSON
// sidecar (full config, seed, config hash, wall clock), and emits plot
// scripts. Exit code 0 iff every cell ran and met its bound band.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov = {});

// Writes one gnuplot script per theorem found in the CSV, next to it.
// Returns the script paths; empty (with a stderr warning) for a header-only
// CSV. Throws schema_error when the header does not match.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv_path);

}  // namespace mdev
