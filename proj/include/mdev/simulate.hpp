#pragma once

#include <vector>

#include "mdev/grid.hpp"
#include "mdev/model.hpp"
#include "mdev/rng.hpp"

namespace mdev {

// Discretized white-noise path: increment i approximates
// int_cell S dt + eps * dw over cell i.
struct Observation {
  Grid grid;
  double epsilon = 0.0;
  std::vector<double> increments;
};

// increment_i = S(node_i, theta) * cell_width + eps * sqrt(cell_width) * Z_i,
// Z_i the stream's i-th normal. eps = 0 is permitted for noiseless test
// oracles only; callers that need a proper observation should validate.
Observation simulate_observation(const SignalModel& model, const Vec& theta,
                                 double epsilon, const Grid& grid,
                                 const NoiseStream& noise);

// Sum_i f_i * increment_i, the discrete int f dY.
double stochastic_integral(const Observation& obs, const std::vector<double>& f);

// T = I^{-1/2}(theta0) * (int S_theta_k dY)_k.
Vec statistic_T(const Observation& obs, const SignalModel& model, const Vec& theta0);

// xi(theta_a, theta_b) = eps^{-1} int (S(.,theta_a) - S(.,theta_b)) dY.
double statistic_xi(const Observation& obs, const SignalModel& model,
                    const Vec& theta_a, const Vec& theta_b);

// L(num, den) = eps^{-2} int (S_num - S_den) dY
//             - (2 eps^2)^{-1} (||S_num||^2 - ||S_den||^2),
// all quadrature on the observation's grid.
double log_likelihood_ratio(const Observation& obs, const SignalModel& model,
                            const Vec& theta_num, const Vec& theta_den);

// exp L(target, proposal) for an observation drawn under the proposal.
// |log w| > 700 is flagged instead of overflowing.
struct ImportanceWeight {
  double log_w = 0.0;
  double w = 1.0;
  bool extreme = false;
};

ImportanceWeight importance_weight(const Observation& obs, const SignalModel& model,
                                   const Vec& target, const Vec& proposal);

}  // namespace mdev
