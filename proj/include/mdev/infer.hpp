#pragma once

#include "mdev/geometry.hpp"
#include "mdev/model.hpp"
#include "mdev/simulate.hpp"

namespace mdev {

enum class TestKind { score_T, neyman_pearson };

// Simple hypothesis theta0 against theta0 + u_eps (d = 1).
struct TestSpec {
  Vec theta0;
  double u_eps = 0.0;
  double alpha = 0.05;  // target level in (0,1)
  TestKind kind = TestKind::score_T;
};

enum class EstimatorKind { mle, score_one_step };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::score_one_step;
  Vec theta_init;
  Vec search_lo, search_hi;  // mle search box
};

enum class Standardization { theta0_known, estimated };

// Confidence membership I^{1/2}(theta0)(estimate - truth) in u_eps * Omega.
struct ConfidenceSpec {
  OmegaSet omega;
  double u_eps = 0.0;
  Standardization standardize_at = Standardization::theta0_known;
};

// Lower quantile: Phi(x_alpha) = alpha; negative for alpha < 1/2.
double normal_quantile_x_alpha(double alpha);

// Standardized score test: rejects iff (T - null mean)/eps >= -x_alpha.
// The null mean I^{-1/2} <score, S(theta0)> reduces to theta0 I^{1/2} for
// linear models; the level is exact for every model because T is a linear
// functional of dY.
bool run_score_test(const Observation& obs, const TestSpec& spec,
                    const SignalModel& model);

// Neyman-Pearson: rejects iff L(theta0+u, theta0) >= c_alpha with
// c_alpha = -rho^2/(2 eps^2) - x_alpha rho/eps.
bool run_np_test(const Observation& obs, const TestSpec& spec,
                 const SignalModel& model);

struct EstimateResult {
  Vec theta;
  bool boundary_hit = false;
};

// Maximizer of L(theta, theta_ref) over the search box: 64^d coarse scan,
// then golden-section (d=1) or coordinate descent (d=2) to 1e-10 in theta.
EstimateResult mle_estimate(const Observation& obs, const SignalModel& model,
                            const EstimatorSpec& spec);

// One-step scoring estimator
//   theta0 + I^{-1}(theta0) int S_theta(t,theta0) (dY - S(t,theta0) dt);
// coincides with the MLE on linear models.
Vec score_one_step(const Observation& obs, const SignalModel& model,
                   const Vec& theta0);

// true iff gauge(I^{1/2}(theta0)(estimate - truth)) > u_eps.
bool confidence_miss(const Vec& estimate, const Vec& truth, const SignalModel& model,
                     const ConfidenceSpec& spec, const Vec& theta0, const Grid& grid);

}  // namespace mdev
