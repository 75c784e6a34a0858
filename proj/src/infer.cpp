#include "mdev/infer.hpp"

#include <cmath>
#include <limits>

#include "mdev/normal.hpp"

namespace mdev {

namespace {

constexpr int kScanPoints = 64;
constexpr double kThetaTol = 1e-10;
constexpr double kGolden = 0.6180339887498949;

// Profile log-likelihood against a fixed reference, as a function of the
// numerator parameter: q(theta) = <S(theta), dY> - ||S(theta)||^2 / 2.
double profile_objective(const Observation& obs, const SignalModel& model,
                         const Vec& theta) {
  double dot = 0.0, norm2 = 0.0;
  for (int i = 0; i < obs.grid.n; ++i) {
    const double s = model.signal(obs.grid.nodes[i], theta);
    dot += s * obs.increments[i];
    norm2 += obs.grid.weights[i] * s * s;
  }
  return dot - 0.5 * norm2;
}

// Golden-section maximization of f over [a, b].
template <typename F>
double golden_max(F f, double a, double b, double tol) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double normal_quantile_x_alpha(double alpha) { return normal_quantile(alpha); }

bool run_score_test(const Observation& obs, const TestSpec& spec,
                    const SignalModel& model) {
  if (model.dim != 1)
    throw std::invalid_argument("run_score_test: one-dimensional parameter only");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    throw std::invalid_argument("run_score_test: alpha must lie in (0,1)");
  const FisherMatrix fisher = fisher_information(model, spec.theta0, obs.grid);
  const auto rows = eval_score(model, spec.theta0, obs.grid);
  const auto s0 = eval_signal(model, spec.theta0, obs.grid);
  const double t = fisher.inv_sqrt(0, 0) * stochastic_integral(obs, rows[0]);
  const double null_mean =
      fisher.inv_sqrt(0, 0) * quad_inner(obs.grid, rows[0], s0);
  const double z = (t - null_mean) / obs.epsilon;
  return z >= -normal_quantile_x_alpha(spec.alpha);
}

bool run_np_test(const Observation& obs, const TestSpec& spec,
                 const SignalModel& model) {
  if (model.dim != 1)
    throw std::invalid_argument("run_np_test: one-dimensional parameter only");
  Vec theta1 = spec.theta0;
  theta1[0] += spec.u_eps;
  const double rho = rho_distance(model, theta1, spec.theta0, obs.grid);
  const double ll = log_likelihood_ratio(obs, model, theta1, spec.theta0);
  const double x_alpha = normal_quantile_x_alpha(spec.alpha);
  const double e2 = obs.epsilon * obs.epsilon;
  const double c_alpha = -0.5 * rho * rho / e2 - x_alpha * rho / obs.epsilon;
  return ll >= c_alpha;
}

EstimateResult mle_estimate(const Observation& obs, const SignalModel& model,
                            const EstimatorSpec& spec) {
  if (model.dim > 2)
    throw std::invalid_argument("mle_estimate: supports d <= 2");
  if (!model.in_domain(spec.search_lo) || !model.in_domain(spec.search_hi))
    throw std::domain_error("mle_estimate: search box leaves the model domain");

  const int d = model.dim;
  const auto objective = [&](const Vec& th) {
    return profile_objective(obs, model, th);
  };

  // coarse scan
  Vec best = spec.search_lo;
  double best_val = -std::numeric_limits<double>::infinity();
  Vec th(d);
  if (d == 1) {
    for (int i = 0; i < kScanPoints; ++i) {
      th[0] = spec.search_lo[0] +
              (spec.search_hi[0] - spec.search_lo[0]) * i / (kScanPoints - 1.0);
      const double v = objective(th);
      if (v > best_val) {
        best_val = v;
        best = th;
      }
    }
  } else {
    for (int i = 0; i < kScanPoints; ++i)
      for (int j = 0; j < kScanPoints; ++j) {
        th[0] = spec.search_lo[0] +
                (spec.search_hi[0] - spec.search_lo[0]) * i / (kScanPoints - 1.0);
        th[1] = spec.search_lo[1] +
                (spec.search_hi[1] - spec.search_lo[1]) * j / (kScanPoints - 1.0);
        const double v = objective(th);
        if (v > best_val) {
          best_val = v;
          best = th;
        }
      }
  }

  // refinement around the scan cell
  EstimateResult res;
  res.theta = best;
  const auto refine_coord = [&](int k) {
    const double step =
        (spec.search_hi[k] - spec.search_lo[k]) / (kScanPoints - 1.0);
    const double a = std::max(spec.search_lo[k], res.theta[k] - step);
    const double b = std::min(spec.search_hi[k], res.theta[k] + step);
    Vec probe = res.theta;
    res.theta[k] = golden_max(
        [&](double x) {
          probe[k] = x;
          return objective(probe);
        },
        a, b, kThetaTol);
  };
  if (d == 1) {
    refine_coord(0);
  } else {
    for (int sweep = 0; sweep < 200; ++sweep) {
      const Vec prev = res.theta;
      refine_coord(0);
      refine_coord(1);
      if ((res.theta - prev).cwiseAbs().maxCoeff() < kThetaTol) break;
    }
  }
  for (int k = 0; k < d; ++k) {
    const double width = spec.search_hi[k] - spec.search_lo[k];
    if (res.theta[k] - spec.search_lo[k] < 1e-6 * width ||
        spec.search_hi[k] - res.theta[k] < 1e-6 * width)
      res.boundary_hit = true;
  }
  return res;
}

Vec score_one_step(const Observation& obs, const SignalModel& model,
                   const Vec& theta0) {
  const FisherMatrix fisher = fisher_information(model, theta0, obs.grid);
  const auto rows = eval_score(model, theta0, obs.grid);
  const auto s0 = eval_signal(model, theta0, obs.grid);
  Vec v(model.dim);
  for (int k = 0; k < model.dim; ++k)
    v[k] = stochastic_integral(obs, rows[k]) - quad_inner(obs.grid, rows[k], s0);
  return theta0 + fisher.inv_sqrt * fisher.inv_sqrt * v;
}

bool confidence_miss(const Vec& estimate, const Vec& truth, const SignalModel& model,
                     const ConfidenceSpec& spec, const Vec& theta0, const Grid& grid) {
  if (spec.u_eps <= 0.0)
    throw std::invalid_argument("confidence_miss: u_eps must be > 0");
  const Vec at =
      spec.standardize_at == Standardization::theta0_known ? theta0 : estimate;
  const FisherMatrix fisher = fisher_information(model, at, grid);
  return spec.omega.gauge(fisher.sqrt * (estimate - truth)) > spec.u_eps;
}

}  // namespace mdev
