#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mdev/normal.hpp"

namespace mdev {

enum class Theorem { T1, T2, T3, T4, T5 };

std::string theorem_name(Theorem t);

// Side-by-side empirical vs. theoretical quantities for one (theorem, eps)
// cell. The named-quantity lists keep insertion order; the first two entries
// feed the fixed CSV columns.
struct BoundReport {
  Theorem theorem = Theorem::T1;
  double epsilon = 0.0;
  double u_eps = 0.0;
  double x = 0.0;             // eps^{-1} u_eps sqrt(I)
  double alpha_target = 0.0;  // NaN when not applicable
  std::vector<std::pair<std::string, double>> empirical;
  std::vector<std::pair<std::string, double>> theoretical;
  double ratio_or_gap = 0.0;
  double se_combined = 0.0;
  bool meets_bound = false;
  bool ok = true;        // false when this cell failed with an error
  bool low_ess = false;  // a constituent estimate degenerated
  std::string message;   // error text or diagnostics
};

// (sqrt(2|ln alpha|) + sqrt(2|ln beta|)) / (eps^{-1} u_eps sqrt(I)).
double theorem1_log_ratio(double alpha, double beta, double epsilon, double u_eps,
                          double fisher_scalar);
// Overload for probabilities only available in log scale.
double theorem1_log_ratio_from_logs(double log_alpha, double log_beta,
                                    double epsilon, double u_eps,
                                    double fisher_scalar);

// eps^2 u_eps^{-2} I^{-1} ln P; the bound says the sup over the two test
// points tends to a limit >= -1/2.
double theorem2_scaled_log(double miss_log, double epsilon, double u_eps,
                           double fisher_scalar);

// Phi(x_alpha - eps^{-1} u_eps sqrt(I)) with the lower quantile
// Phi(x_alpha) = alpha, evaluated through the log-capable CDF.
double theorem3_sharp_beta(double alpha, double epsilon, double u_eps,
                           double fisher_scalar);
// log of the same quantity, safe deep into the tail.
double theorem3_sharp_beta_log(double alpha, double epsilon, double u_eps,
                               double fisher_scalar);

// 2 Phi(-eps^{-1} sqrt(I) u_eps).
double theorem4_denominator(double epsilon, double u_eps, double fisher_scalar);
double theorem4_denominator_log(double epsilon, double u_eps, double fisher_scalar);

// miss / exceedance, guarded against a vanishing denominator.
double theorem5_ratio(double miss_prob, double exceed_prob);

}  // namespace mdev
