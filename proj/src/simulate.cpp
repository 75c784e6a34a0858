#include "mdev/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdev {

Observation simulate_observation(const SignalModel& model, const Vec& theta,
                                 double epsilon, const Grid& grid,
                                 const NoiseStream& noise) {
  if (epsilon < 0.0)
    throw std::invalid_argument("simulate_observation: epsilon must be >= 0");
  model.require_in_domain(theta);
  Observation obs;
  obs.grid = grid;
  obs.epsilon = epsilon;
  obs.increments.resize(grid.n);
  const CounterRng rng(noise);
  const double sdt = std::sqrt(grid.cell_width);
  for (int i = 0; i < grid.n; ++i) {
    const double drift = model.signal(grid.nodes[i], theta) * grid.cell_width;
    obs.increments[i] = epsilon == 0.0 ? drift : drift + epsilon * sdt * rng.normal(i);
  }
  return obs;
}

double stochastic_integral(const Observation& obs, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != obs.grid.n)
    throw std::invalid_argument("stochastic_integral: integrand length mismatch");
  double s = 0.0;
  for (int i = 0; i < obs.grid.n; ++i) s += f[i] * obs.increments[i];
  return s;
}

Vec statistic_T(const Observation& obs, const SignalModel& model, const Vec& theta0) {
  const FisherMatrix fisher = fisher_information(model, theta0, obs.grid);
  const auto rows = eval_score(model, theta0, obs.grid);
  Vec integrals(model.dim);
  for (int k = 0; k < model.dim; ++k)
    integrals[k] = stochastic_integral(obs, rows[k]);
  return fisher.inv_sqrt * integrals;
}

double statistic_xi(const Observation& obs, const SignalModel& model,
                    const Vec& theta_a, const Vec& theta_b) {
  if (obs.epsilon <= 0.0)
    throw std::invalid_argument("statistic_xi: requires epsilon > 0");
  const auto sa = eval_signal(model, theta_a, obs.grid);
  const auto sb = eval_signal(model, theta_b, obs.grid);
  std::vector<double> diff(obs.grid.n);
  for (int i = 0; i < obs.grid.n; ++i) diff[i] = sa[i] - sb[i];
  return stochastic_integral(obs, diff) / obs.epsilon;
}

double log_likelihood_ratio(const Observation& obs, const SignalModel& model,
                            const Vec& theta_num, const Vec& theta_den) {
  if (obs.epsilon <= 0.0)
    throw std::invalid_argument("log_likelihood_ratio: requires epsilon > 0");
  const auto sn = eval_signal(model, theta_num, obs.grid);
  const auto sd = eval_signal(model, theta_den, obs.grid);
  std::vector<double> diff(obs.grid.n);
  double n2 = 0.0, d2 = 0.0;
  for (int i = 0; i < obs.grid.n; ++i) {
    diff[i] = sn[i] - sd[i];
    n2 += obs.grid.weights[i] * sn[i] * sn[i];
    d2 += obs.grid.weights[i] * sd[i] * sd[i];
  }
  const double e2 = obs.epsilon * obs.epsilon;
  return stochastic_integral(obs, diff) / e2 - 0.5 * (n2 - d2) / e2;
}

ImportanceWeight importance_weight(const Observation& obs, const SignalModel& model,
                                   const Vec& target, const Vec& proposal) {
  ImportanceWeight iw;
  iw.log_w = log_likelihood_ratio(obs, model, target, proposal);
  iw.extreme = std::abs(iw.log_w) > 700.0;
  iw.w = iw.extreme ? (iw.log_w > 0.0 ? std::numeric_limits<double>::infinity() : 0.0)
                    : std::exp(iw.log_w);
  return iw;
}

}  // namespace mdev
