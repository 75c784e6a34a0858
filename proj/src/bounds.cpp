#include "mdev/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdev {

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3: return "T3";
    case Theorem::T4: return "T4";
    case Theorem::T5: return "T5";
  }
  return "?";
}

double theorem1_log_ratio_from_logs(double log_alpha, double log_beta,
                                    double epsilon, double u_eps,
                                    double fisher_scalar) {
  if (!(fisher_scalar > 0.0))
    throw std::domain_error("theorem1_log_ratio: Fisher scalar must be > 0");
  const double denom = u_eps * std::sqrt(fisher_scalar) / epsilon;
  if (!(denom > 0.0))
    throw std::domain_error("theorem1_log_ratio: eps^{-1} u_eps sqrt(I) must be > 0");
  return (std::sqrt(2.0 * std::abs(log_alpha)) +
          std::sqrt(2.0 * std::abs(log_beta))) /
         denom;
}

double theorem1_log_ratio(double alpha, double beta, double epsilon, double u_eps,
                          double fisher_scalar) {
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
    throw std::domain_error(
        "theorem1_log_ratio: alpha, beta must lie in (0,1); use the log "
        "overload for underflowing probabilities");
  return theorem1_log_ratio_from_logs(std::log(alpha), std::log(beta), epsilon,
                                      u_eps, fisher_scalar);
}

double theorem2_scaled_log(double miss_log, double epsilon, double u_eps,
                           double fisher_scalar) {
  if (!(miss_log < 0.0))
    throw std::domain_error("theorem2_scaled_log: miss_log must be negative");
  return epsilon * epsilon / (u_eps * u_eps * fisher_scalar) * miss_log;
}

double theorem3_sharp_beta(double alpha, double epsilon, double u_eps,
                           double fisher_scalar) {
  return std::exp(theorem3_sharp_beta_log(alpha, epsilon, u_eps, fisher_scalar));
}

double theorem3_sharp_beta_log(double alpha, double epsilon, double u_eps,
                               double fisher_scalar) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("theorem3_sharp_beta: alpha must lie in (0,1)");
  const double x_alpha = normal_quantile(alpha);
  const double shift = u_eps * std::sqrt(fisher_scalar) / epsilon;
  return log_normal_cdf(x_alpha - shift);
}

double theorem4_denominator(double epsilon, double u_eps, double fisher_scalar) {
  if (!(epsilon > 0.0 && u_eps >= 0.0 && fisher_scalar > 0.0))
    throw std::domain_error("theorem4_denominator: invalid inputs");
  return 2.0 * normal_cdf(-u_eps * std::sqrt(fisher_scalar) / epsilon);
}

double theorem4_denominator_log(double epsilon, double u_eps, double fisher_scalar) {
  if (!(epsilon > 0.0 && u_eps >= 0.0 && fisher_scalar > 0.0))
    throw std::domain_error("theorem4_denominator: invalid inputs");
  return std::log(2.0) + log_normal_cdf(-u_eps * std::sqrt(fisher_scalar) / epsilon);
}

double theorem5_ratio(double miss_prob, double exceed_prob) {
  if (!(exceed_prob > 10.0 * std::numeric_limits<double>::epsilon()))
    throw std::domain_error("theorem5_ratio: exceedance probability too small");
  return miss_prob / exceed_prob;
}

}  // namespace mdev
