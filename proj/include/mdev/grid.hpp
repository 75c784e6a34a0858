#pragma once

#include <vector>

namespace mdev {

// Quadrature grid on (0,1). Deterministic and stochastic integrals share
// these nodes so linear-model statistics keep their exact Gaussian laws at
// every resolution.
struct Grid {
  int n = 0;
  std::vector<double> nodes;    // strictly increasing midpoints in (0,1)
  std::vector<double> weights;  // positive, sum to 1
  double cell_width = 0.0;

  // Composite midpoint rule with n uniform cells.
  static Grid uniform(int n);
};

// Sum_i w_i f_i g_i.
double quad_inner(const Grid& grid, const std::vector<double>& f,
                  const std::vector<double>& g);

// Sum_i w_i f_i^2.
double quad_norm2(const Grid& grid, const std::vector<double>& f);

}  // namespace mdev
