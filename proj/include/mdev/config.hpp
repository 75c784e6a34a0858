#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdev/bounds.hpp"
#include "mdev/schedule.hpp"

namespace mdev {

struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat dotted-key experiment configuration, the on-disk format of the
// `run` subcommand. Parsing keeps the effective values round-trippable
// through the JSON sidecar.
struct ExperimentConfig {
  std::string model_name = "linear-sin";
  double model_gamma = 0.2;  // power-cusp only
  std::vector<double> theta0 = {0.0};
  std::vector<Theorem> theorems;
  Schedule schedule;
  double alpha = 0.05;
  std::string omega_kind = "ball";  // "ball" or "ellipsoid:a1,...,ad"
  std::uint64_t n_rep = 20000;
  std::uint64_t seed = 20240901;
  int grid_n = 256;
  std::string output_dir = "out";

  // flat map with canonical formatting; parse(to_flat_map()) is identity
  std::map<std::string, std::string> to_flat_map() const;
  static ExperimentConfig from_flat_map(const std::map<std::string, std::string>& kv);

  // key = value lines, '#' comments
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  // schedule + name resolution checks; throws schema_error on violations
  void validate() const;
};

std::vector<double> parse_double_list(const std::string& s);
std::string format_double_list(const std::vector<double>& v);
std::vector<Theorem> parse_theorem_list(const std::string& s);
std::string format_theorem_list(const std::vector<Theorem>& v);

// hex SHA-256 of a byte string (config content hash for the sidecar)
std::string sha256_hex(const std::string& bytes);

}  // namespace mdev
