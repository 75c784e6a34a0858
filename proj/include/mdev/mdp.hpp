#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mdev/bounds.hpp"
#include "mdev/geometry.hpp"
#include "mdev/infer.hpp"
#include "mdev/schedule.hpp"

namespace mdev {

struct TiltSpec {
  enum class Mode {
    automatic,     // exponential tilt with the event boundary at the tilted mean
    none,          // plain Monte Carlo
    to_parameter,  // simulate under the given parameter
  };
  Mode mode = Mode::automatic;
  Vec theta_star;

  static TiltSpec plain() { return {Mode::none, {}}; }
  static TiltSpec at(const Vec& theta) { return {Mode::to_parameter, theta}; }
};

struct MCConfig {
  std::uint64_t n_rep = 100000;
  std::uint64_t seed = 1;
  TiltSpec tilt;
  int grid_n = 1024;
  int workers = 1;                 // output is identical for any value
  std::uint64_t stream_base = 0;   // offset into the replicate stream space

  void validate() const;
};

// Probability estimate from (possibly tilted) Monte Carlo. log_p and rel_se
// stay finite far below the double underflow point of p_hat itself.
struct RareEventEstimate {
  double p_hat = 0.0;
  double se = 0.0;
  double log_p = 0.0;
  double ess = 0.0;     // (sum w)^2 / sum w^2 over the summed terms
  double rel_se = 0.0;  // se / p_hat, computed in extended precision
  std::uint64_t n_rep = 0;
  bool clamped = false;
  bool low_ess = false;          // ess < 0.01 n_rep
  bool extreme_weights = false;  // some |log w| > 700 on the event
};

// Type I and type II error probabilities of the given test, each by
// exponentially tilted Monte Carlo reweighted to its own measure.
std::pair<RareEventEstimate, RareEventEstimate> estimate_error_probs(
    const SignalModel& model, const TestSpec& spec, double epsilon,
    const MCConfig& cfg);

// P_theta(|theta_hat - theta| > u_eps) for d = 1, or the Omega-miss
// probability gauge(I^{1/2}(theta0)(theta_hat - theta)) > u_eps for d = 2.
// Two-sided (d=1) or sector (d=2) stratification with one tilt per stratum,
// each stratum estimating its disjoint component of the event.
RareEventEstimate estimate_miss_prob(const SignalModel& model,
                                     const EstimatorSpec& est, const Vec& theta,
                                     double u_eps, double epsilon,
                                     const MCConfig& cfg,
                                     const std::optional<ConfidenceSpec>& conf = {});

// P(zeta notin r * Omega) for standard Gaussian zeta: analytic chi-square
// tail for balls, direction-sampled exact radial tails for ellipsoids, and
// mean-shift importance sampling at the +-nearest boundary points for
// generic bodies.
RareEventEstimate gauss_exceedance(const OmegaSet& omega, double r,
                                   const MCConfig& cfg);

// P(eta1 > c) / P(eta1 + eta2 > c) for centered Gaussians with
// E[eta1^2] = 1, E[eta2^2] = var2, E[eta1 eta2] = cov12. Analytic.
double lemma1_tail_ratio(double var2, double cov12, double c);

// theorem5_ratio against a Monte Carlo denominator.
double theorem5_ratio(double miss_prob, const RareEventEstimate& exceed);

// Orchestration of the per-theorem comparisons.
struct ComparisonPlan {
  std::vector<Theorem> theorems;
  Vec theta0;
  double alpha = 0.05;        // score-test level for the T3 rows
  std::optional<OmegaSet> omega;  // T5 body; defaults to the unit ball
  double t4_window = 2.0;     // lattice half-width in units of u_eps
  int t4_points = 9;
};

std::vector<BoundReport> bound_comparison_run(const SignalModel& model,
                                              const Schedule& schedule,
                                              const ComparisonPlan& plan,
                                              const MCConfig& cfg);

}  // namespace mdev
