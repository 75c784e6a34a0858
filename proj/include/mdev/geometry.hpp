#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdev/model.hpp"

namespace mdev {

enum class OmegaKind { ball, ellipsoid, generic };

// Bounded convex central-symmetric body, represented by its gauge
// (Minkowski functional): gauge(x) <= r iff x lies in r * Omega.
struct OmegaSet {
  int dim = 0;
  OmegaKind kind = OmegaKind::generic;
  std::function<double(const Vec&)> gauge;
  Mat shape;  // ellipsoid only: gauge(x) = sqrt(x' shape x)

  static OmegaSet ball(int dim);
  // Axis-aligned ellipsoid with semi-axes a_k: gauge^2 = sum (x_k/a_k)^2.
  static OmegaSet ellipsoid(const std::vector<double>& axes);
  static OmegaSet ellipsoid_from_shape(const Mat& shape);
  static OmegaSet generic(int dim, std::function<double(const Vec&)> gauge);

  double operator()(const Vec& x) const { return gauge(x); }
};

// true iff gauge(x) <= radius (boundary counts as inside).
bool contains(const OmegaSet& omega, const Vec& x, double radius);

// Body with gauge'(x) = gauge(map * x); map must be nonsingular.
OmegaSet affine_image_gauge(const OmegaSet& omega, const Mat& map);

struct A4Report {
  bool symmetric = true;
  bool homogeneous = true;
  bool convex = true;
  bool strictly_curved = true;
  bool bounded = true;
  bool passes = true;
  // first failing probe pair, when any
  std::optional<std::pair<Vec, Vec>> witness;
  std::string detail;
};

// Probes symmetry, positive homogeneity, subadditivity, boundedness and
// the strict midpoint inequality on seeded deterministic directions.
A4Report validate_a4(const OmegaSet& omega, int n_dirs, std::uint64_t seed = 20240901);

// Deterministic low-discrepancy unit directions (golden-angle for d=2,
// hashed-normal otherwise).
std::vector<Vec> sphere_directions(int dim, int count, std::uint64_t seed);

}  // namespace mdev
