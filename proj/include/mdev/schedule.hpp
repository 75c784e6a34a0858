#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace mdev {

// Moderate-deviation schedule: separations u_eps = a * eps^delta must grow
// in standardized units (eps^{-1} u_eps up) while staying inside the sharp
// zone (eps^{-2} u_eps^{2+lambda} down), which pins 2/(2+lambda) < delta < 1.
struct Schedule {
  std::vector<double> eps_list;  // strictly decreasing, positive
  double a = 1.0;
  double delta = 0.8;
  double lambda = 1.0;

  double u(double eps) const { return a * std::pow(eps, delta); }
};

struct ScheduleViolation {
  double eps;  // offending epsilon, or 0 for rule-level violations
  std::string what;
};

// Empty result means the schedule is valid.
std::vector<ScheduleViolation> validate_schedule(const Schedule& s);

}  // namespace mdev
