// mdev: moderate-deviation bound experiments for signal-in-white-noise
// inference. Subcommands: fisher, check-model, run, gauss-exceed, lemma1.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "mdev/config.hpp"
#include "mdev/mdp.hpp"
#include "mdev/runner.hpp"

namespace {

using namespace mdev;

int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MDEV_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), v.size());
}

void print_matrix(const char* label, const Mat& m) {
  std::printf("%s:\n", label);
  for (int i = 0; i < m.rows(); ++i) {
    std::printf(" ");
    for (int j = 0; j < m.cols(); ++j) std::printf(" % .12g", m(i, j));
    std::printf("\n");
  }
}

int cmd_fisher(const std::string& model_name, double gamma,
               const std::string& theta0_csv, int grid_n) {
  ModelParams params;
  params.gamma = gamma;
  const SignalModel model = make_model(model_name, params);
  const auto theta0 = parse_double_list(theta0_csv);
  if (static_cast<int>(theta0.size()) != model.dim) {
    std::fprintf(stderr, "theta0 must have dimension %d\n", model.dim);
    return 2;
  }
  const Grid grid = Grid::uniform(grid_n);
  const FisherMatrix f = fisher_information(model, to_vec(theta0), grid);
  print_matrix("I(theta0)", f.matrix);
  print_matrix("I^{1/2}", f.sqrt);
  print_matrix("I^{-1/2}", f.inv_sqrt);
  return 0;
}

int cmd_check_model(const std::string& model_name, double gamma, double lambda,
                    const std::string& theta0_csv, const std::string& radii_csv,
                    int grid_n) {
  ModelParams params;
  params.gamma = gamma;
  params.lambda = lambda;
  const SignalModel model = make_model(model_name, params);
  const auto theta0 = parse_double_list(theta0_csv);
  if (static_cast<int>(theta0.size()) != model.dim) {
    std::fprintf(stderr, "theta0 must have dimension %d\n", model.dim);
    return 2;
  }
  const auto radii = parse_double_list(radii_csv);
  const Grid grid = Grid::uniform(grid_n);
  const RegularityReport rep =
      check_regularity(model, to_vec(theta0), grid, radii);
  std::printf("regularity audit for %s at theta0 = %s (lambda = %g)\n",
              model_name.c_str(), theta0_csv.c_str(), lambda);
  std::printf("%12s %14s %14s %14s\n", "radius", "resid_1.3", "resid_1.4",
              "resid_1.5");
  for (size_t i = 0; i < rep.radii.size(); ++i)
    std::printf("%12.6g %14.6g %14.6g %14.6g\n", rep.radii[i], rep.residual_12[i],
                rep.residual_14[i], rep.residual_15[i]);
  const auto order = [](bool resolved, double v) {
    return resolved ? std::to_string(v) : std::string("unresolved");
  };
  std::printf("fitted orders: (1.3) %s  (1.4) %s  (1.5) %s\n",
              order(rep.resolved_12, rep.order_12).c_str(),
              order(rep.resolved_14, rep.order_14).c_str(),
              order(rep.resolved_15, rep.order_15).c_str());
  std::printf("A1 %s, A2 %s, A3 %s\n", rep.passes_a1 ? "pass" : "FAIL",
              rep.passes_a2 ? "pass" : "FAIL", rep.passes_a3 ? "pass" : "FAIL");
  return 0;
}

int cmd_gauss_exceed(const std::string& omega_kind, int dim, double r,
                     std::uint64_t n_rep, std::uint64_t seed, int workers) {
  OmegaSet omega = omega_kind == "ball"
                       ? OmegaSet::ball(dim)
                       : OmegaSet::ellipsoid(parse_double_list(
                             omega_kind.substr(omega_kind.find(':') + 1)));
  MCConfig cfg;
  cfg.n_rep = n_rep;
  cfg.seed = seed;
  cfg.workers = workers;
  const RareEventEstimate est = gauss_exceedance(omega, r, cfg);
  std::printf("P(zeta notin %g * Omega) = %.6e  (se %.2e, log %.6f, ess %.3g)\n", r,
              est.p_hat, est.se, est.log_p, est.ess);
  return 0;
}

int cmd_lemma1(double c, const std::string& gammas_csv) {
  std::printf("%12s %18s %14s\n", "gamma", "ratio", "|ratio-1|");
  for (double g : parse_double_list(gammas_csv)) {
    const double ratio = lemma1_tail_ratio(g, g, c);
    std::printf("%12.6g %18.12f %14.6e\n", g, ratio, std::abs(ratio - 1.0));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moderate-deviation bound experiments in the white-noise model"};
  app.require_subcommand(1);

  std::string model_name = "linear-sin", theta0_csv = "0";
  std::string radii_csv = "0.2,0.1,0.05,0.025,0.0125";
  double gamma = 0.2, lambda = 1.0;
  int grid_n = 4096;

  auto* fisher = app.add_subcommand("fisher", "print I(theta0) for a model");
  fisher->add_option("--model", model_name, "model name");
  fisher->add_option("--gamma", gamma, "power-cusp exponent");
  fisher->add_option("--theta0", theta0_csv, "comma-separated theta0");
  fisher->add_option("--grid-n", grid_n, "quadrature cells");

  auto* check = app.add_subcommand("check-model", "regularity audit (A1-A3)");
  check->add_option("--model", model_name, "model name");
  check->add_option("--gamma", gamma, "power-cusp exponent");
  check->add_option("--lambda", lambda, "smoothness exponent");
  check->add_option("--theta0", theta0_csv, "comma-separated theta0");
  check->add_option("--radii", radii_csv, "decreasing probe radii");
  check->add_option("--grid-n", grid_n, "quadrature cells");

  std::string config_path;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int workers_flag = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run experiments from a config file");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--seed", seed_flag, "override mc.seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--workers", workers_flag,
                  "worker threads (default: all cores, or MDEV_WORKERS)");
  run->add_option("--out", out_dir, "override output.dir");

  std::string omega_kind = "ball";
  int dim = 2;
  double radius = 3.0;
  std::uint64_t n_rep = 100000, seed = 20240901;
  auto* ge = app.add_subcommand("gauss-exceed", "ad-hoc P(zeta notin r*Omega)");
  ge->add_option("--omega", omega_kind, "'ball' or 'ellipsoid:a1,...,ad'");
  ge->add_option("--dim", dim, "dimension (ball only)");
  ge->add_option("--r", radius, "scale r")->required();
  ge->add_option("--n-rep", n_rep, "replicates");
  ge->add_option("--seed", seed, "seed");
  ge->add_option("--workers", workers_flag, "worker threads");

  double c_value = 3.0;
  std::string gammas_csv = "0.04,0.01,0.0025";
  auto* l1 = app.add_subcommand("lemma1", "tail-ratio table for the Gaussian lemma");
  l1->add_option("--c", c_value, "threshold c > 0");
  l1->add_option("--gammas", gammas_csv, "values for var2 = cov12");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fisher->parsed()) return cmd_fisher(model_name, gamma, theta0_csv, grid_n);
    if (check->parsed())
      return cmd_check_model(model_name, gamma, lambda, theta0_csv, radii_csv,
                             grid_n);
    if (run->parsed()) {
      const ExperimentConfig cfg = ExperimentConfig::load(config_path);
      RunOverrides ov;
      if (seed_set) ov.seed = seed_flag;
      ov.workers = resolve_workers(workers_flag);
      if (!out_dir.empty()) ov.out_dir = out_dir;
      const RunResult res = run_experiment(cfg, ov);
      std::printf("wrote %s (%zu rows), exit %d\n", res.csv_path.string().c_str(),
                  res.reports.size(), res.exit_code);
      for (const auto& rep : res.reports)
        if (!rep.ok)
          std::fprintf(stderr, "cell %s eps=%g failed: %s\n",
                       theorem_name(rep.theorem).c_str(), rep.epsilon,
                       rep.message.c_str());
      return res.exit_code;
    }
    if (ge->parsed())
      return cmd_gauss_exceed(omega_kind, dim, radius, n_rep, seed,
                              resolve_workers(workers_flag));
    if (l1->parsed()) return cmd_lemma1(c_value, gammas_csv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
