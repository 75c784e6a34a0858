#include "mdev/grid.hpp"

#include <stdexcept>

namespace mdev {

Grid Grid::uniform(int n) {
  if (n <= 0) throw std::invalid_argument("Grid::uniform: n must be positive");
  Grid g;
  g.n = n;
  g.cell_width = 1.0 / n;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    g.nodes[i] = (i + 0.5) / n;
    g.weights[i] = g.cell_width;
  }
  return g;
}

double quad_inner(const Grid& grid, const std::vector<double>& f,
                  const std::vector<double>& g) {
  if (f.size() != grid.nodes.size() || g.size() != grid.nodes.size())
    throw std::invalid_argument("quad_inner: length mismatch with grid");
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += grid.weights[i] * f[i] * g[i];
  return s;
}

double quad_norm2(const Grid& grid, const std::vector<double>& f) {
  return quad_inner(grid, f, f);
}

}  // namespace mdev
