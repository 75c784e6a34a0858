#include "mdev/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>

#include "mdev/model.hpp"

namespace mdev {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double nth_value(const std::vector<std::pair<std::string, double>>& kv, size_t i) {
  return i < kv.size() ? kv[i].second : std::numeric_limits<double>::quiet_NaN();
}

OmegaSet omega_from_kind(const std::string& kind, int dim) {
  if (kind == "ball") return OmegaSet::ball(dim);
  if (kind.rfind("ellipsoid:", 0) == 0)
    return OmegaSet::ellipsoid(parse_double_list(kind.substr(10)));
  throw schema_error("unknown omega kind '" + kind + "'");
}

}  // namespace

const char* const kCsvHeader =
    "theorem,epsilon,u_eps,x,alpha_target,empirical_1,empirical_2,"
    "theoretical_1,theoretical_2,ratio,se_combined,meets_bound";

std::string report_csv_row(const BoundReport& rep) {
  std::string row = theorem_name(rep.theorem);
  row += "," + fmt(rep.epsilon);
  row += "," + fmt(rep.u_eps);
  row += "," + fmt(rep.x);
  row += "," + fmt(rep.alpha_target);
  if (rep.ok) {
    row += "," + fmt(nth_value(rep.empirical, 0));
    row += "," + fmt(nth_value(rep.empirical, 1));
    row += "," + fmt(nth_value(rep.theoretical, 0));
    row += "," + fmt(nth_value(rep.theoretical, 1));
    row += "," + fmt(rep.ratio_or_gap);
    row += "," + fmt(rep.se_combined);
    row += rep.meets_bound ? ",true" : ",false";
  } else {
    row += ",NA,NA,NA,NA,NA,NA,NA";
  }
  return row;
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
  std::string out = kCsvHeader;
  out += "\n";
  for (const auto& rep : reports) {
    out += report_csv_row(rep);
    out += "\n";
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& base_cfg, const RunOverrides& ov) {
  ExperimentConfig cfg = base_cfg;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output_dir = *ov.out_dir;
  cfg.validate();

  const auto t_begin = std::chrono::steady_clock::now();

  ModelParams params;
  params.gamma = cfg.model_gamma;
  params.lambda = cfg.schedule.lambda;
  const SignalModel model = make_model(cfg.model_name, params);
  if (static_cast<int>(cfg.theta0.size()) != model.dim)
    throw schema_error("config: theta0 dimension does not match the model");

  ComparisonPlan plan;
  plan.theorems = cfg.theorems;
  plan.theta0 = Eigen::Map<const Vec>(cfg.theta0.data(), cfg.theta0.size());
  plan.alpha = cfg.alpha;
  plan.omega = omega_from_kind(cfg.omega_kind, model.dim);
  if (plan.omega->dim != model.dim)
    throw schema_error("config: omega dimension does not match the model");

  MCConfig mc;
  mc.n_rep = cfg.n_rep;
  mc.seed = cfg.seed;
  mc.grid_n = cfg.grid_n;
  mc.workers = ov.workers.value_or(1);

  RunResult result;
  result.reports = bound_comparison_run(model, cfg.schedule, plan, mc);

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  result.csv_path = dir / "results.csv";
  result.sidecar_path = dir / "results.json";

  const std::string csv = reports_to_csv(result.reports);
  {
    std::ofstream out(result.csv_path, std::ios::binary);
    out << csv;
  }

  // sidecar: effective config, seed, content hash, wall clock
  std::string config_text;
  for (const auto& [k, v] : cfg.to_flat_map()) config_text += k + " = " + v + "\n";
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  json sidecar;
  sidecar["config"] = cfg.to_flat_map();
  sidecar["seed"] = cfg.seed;
  sidecar["config_sha256"] = sha256_hex(config_text);
  sidecar["wall_clock_seconds"] = wall;
  sidecar["csv"] = result.csv_path.filename().string();
  json cells = json::array();
  for (const auto& rep : result.reports) {
    json c;
    c["theorem"] = theorem_name(rep.theorem);
    c["epsilon"] = rep.epsilon;
    c["u_eps"] = rep.u_eps;
    c["ok"] = rep.ok;
    if (!rep.ok) c["error"] = rep.message;
    for (const auto& [k, v] : rep.empirical)
      if (!k.empty()) c["empirical"][k] = v;
    for (const auto& [k, v] : rep.theoretical)
      if (!k.empty()) c["theoretical"][k] = v;
    c["ratio"] = rep.ratio_or_gap;
    c["meets_bound"] = rep.meets_bound;
    cells.push_back(c);
  }
  sidecar["cells"] = cells;
  {
    std::ofstream out(result.sidecar_path, std::ios::binary);
    out << sidecar.dump(2) << "\n";
  }

  emit_plots(result.csv_path);

  for (const auto& rep : result.reports)
    if (!rep.ok || !rep.meets_bound || rep.low_ess) result.exit_code = 1;
  return result;
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw schema_error("emit_plots: cannot open " + csv_path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kCsvHeader)
    throw schema_error("emit_plots: unexpected CSV schema in " + csv_path.string());

  std::vector<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const std::string thm = line.substr(0, comma);
    if (std::find(seen.begin(), seen.end(), thm) == seen.end()) seen.push_back(thm);
  }
  std::vector<std::filesystem::path> scripts;
  if (seen.empty()) {
    std::cerr << "emit_plots: no data rows in " << csv_path << ", nothing to plot\n";
    return scripts;
  }
  for (const auto& thm : seen) {
    const auto path = csv_path.parent_path() / ("plot_" + thm + ".gnuplot");
    std::ofstream out(path, std::ios::binary);
    out << "# ratio vs eps^{-1} u_eps for " << thm << " (y -> 1 is attainment)\n"
        << "set datafile separator ','\n"
        << "set xlabel 'eps^{-1} u_eps sqrt(I)'\n"
        << "set ylabel 'ratio'\n"
        << "set title '" << thm << " bound comparison'\n"
        << "set key left top\n"
        << "plot '" << csv_path.filename().string() << "' "
        << "using (strcol(1) eq '" << thm << "' ? $4 : 1/0):10 "
        << "with linespoints title '" << thm << " ratio', 1 title 'limit'\n";
    scripts.push_back(path);
  }
  return scripts;
}

}  // namespace mdev
