#include "mdev/geometry.hpp"

#include <cmath>
#include <limits>

#include "mdev/rng.hpp"

namespace mdev {

namespace {
constexpr double kSymTol = 1e-12;
constexpr double kHomTol = 1e-10;
constexpr double kCurvatureMarginRel = 1e-6;
constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)
}  // namespace

OmegaSet OmegaSet::ball(int dim) {
  OmegaSet o;
  o.dim = dim;
  o.kind = OmegaKind::ball;
  o.shape = Mat::Identity(dim, dim);
  o.gauge = [](const Vec& x) { return x.norm(); };
  return o;
}

OmegaSet OmegaSet::ellipsoid(const std::vector<double>& axes) {
  const int d = static_cast<int>(axes.size());
  Mat q = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    if (axes[k] <= 0.0)
      throw std::invalid_argument("ellipsoid: semi-axes must be positive");
    q(k, k) = 1.0 / (axes[k] * axes[k]);
  }
  return ellipsoid_from_shape(q);
}

OmegaSet OmegaSet::ellipsoid_from_shape(const Mat& shape) {
  OmegaSet o;
  o.dim = static_cast<int>(shape.rows());
  o.kind = OmegaKind::ellipsoid;
  o.shape = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(o.shape);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("ellipsoid shape matrix must be positive definite");
  const Mat q = o.shape;
  o.gauge = [q](const Vec& x) { return std::sqrt(x.dot(q * x)); };
  return o;
}

OmegaSet OmegaSet::generic(int dim, std::function<double(const Vec&)> gauge) {
  OmegaSet o;
  o.dim = dim;
  o.kind = OmegaKind::generic;
  o.gauge = std::move(gauge);
  return o;
}

bool contains(const OmegaSet& omega, const Vec& x, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("contains: radius must be > 0");
  return omega.gauge(x) <= radius;
}

OmegaSet affine_image_gauge(const OmegaSet& omega, const Mat& map) {
  Eigen::FullPivLU<Mat> lu(map);
  if (!lu.isInvertible())
    throw std::invalid_argument("affine_image_gauge: map is singular");
  if (omega.kind != OmegaKind::generic) {
    // quadratic gauges stay quadratic: gauge(Mx)^2 = x'M'QMx
    return OmegaSet::ellipsoid_from_shape(map.transpose() * omega.shape * map);
  }
  OmegaSet o;
  o.dim = omega.dim;
  o.kind = OmegaKind::generic;
  const auto inner = omega.gauge;
  const Mat m = map;
  o.gauge = [inner, m](const Vec& x) { return inner(m * x); };
  return o;
}

std::vector<Vec> sphere_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (dim == 1) {
    for (int i = 0; i < count; ++i) {
      Vec v(1);
      v[0] = i % 2 == 0 ? 1.0 : -1.0;
      dirs.push_back(v);
    }
    return dirs;
  }
  if (dim == 2) {
    const CounterRng rng(seed, 0);
    const double offset = rng.uniform(0) * 2.0 * M_PI;
    for (int i = 0; i < count; ++i) {
      const double a = offset + i * kGoldenAngle;
      Vec v(2);
      v[0] = std::cos(a);
      v[1] = std::sin(a);
      dirs.push_back(v);
    }
    return dirs;
  }
  const CounterRng rng(seed, 1);
  std::uint64_t k = 0;
  while (static_cast<int>(dirs.size()) < count) {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = rng.normal(k++);
    const double nrm = v.norm();
    if (nrm > 1e-8) dirs.push_back(v / nrm);
  }
  return dirs;
}

A4Report validate_a4(const OmegaSet& omega, int n_dirs, std::uint64_t seed) {
  if (n_dirs < 100)
    throw std::invalid_argument("validate_a4: need at least 100 directions");
  A4Report rep;
  const auto dirs = sphere_directions(omega.dim, n_dirs, seed);

  // boundedness / nondegeneracy and scalar probes
  double min_gauge = std::numeric_limits<double>::infinity();
  for (const Vec& v : dirs) {
    const double g = omega.gauge(v);
    min_gauge = std::min(min_gauge, g);
    if (std::abs(omega.gauge(-v) - g) > kSymTol * std::max(1.0, g)) {
      rep.symmetric = false;
      rep.witness = {v, -v};
      rep.detail = "gauge(-x) != gauge(x)";
      break;
    }
    for (double c : {0.25, 2.0, 7.5}) {
      if (std::abs(omega.gauge(c * v) - c * g) > kHomTol * std::max(1.0, c * g)) {
        rep.homogeneous = false;
        rep.witness = {v, c * v};
        rep.detail = "gauge(cx) != c gauge(x)";
      }
    }
    if (!rep.homogeneous) break;
  }
  if (!(min_gauge > 0.0)) {
    rep.bounded = false;
    rep.detail = "gauge vanishes on a direction (unbounded body)";
  }

  // pairwise probes: subadditivity and strict midpoint convexity on
  // boundary-normalized, non-parallel pairs
  const int stride = 7;
  for (size_t i = 0; i + 1 < dirs.size() && rep.convex && rep.strictly_curved; ++i) {
    for (size_t j = i + 1; j < std::min(dirs.size(), i + 1 + stride); ++j) {
      const Vec& x = dirs[i];
      const Vec& y = dirs[j];
      const double gx = omega.gauge(x), gy = omega.gauge(y);
      if (gx <= 0.0 || gy <= 0.0) continue;
      if (omega.gauge(x + y) > gx + gy + kHomTol) {
        rep.convex = false;
        rep.witness = {x, y};
        rep.detail = "subadditivity fails";
        break;
      }
      const Vec bx = x / gx, by = y / gy;  // on the boundary
      // skip nearly-parallel pairs: their midpoint sits within the margin
      // even on a strictly convex boundary
      const double parallel = std::abs(bx.normalized().dot(by.normalized()));
      if (parallel > 1.0 - 1e-4) continue;
      const double margin = kCurvatureMarginRel;  // gauges at bx, by are 1
      if (omega.gauge(0.5 * (bx + by)) >= 1.0 - margin) {
        rep.strictly_curved = false;
        rep.witness = {bx, by};
        rep.detail = "flat boundary segment (midpoint inequality not strict)";
        break;
      }
    }
  }

  rep.passes = rep.symmetric && rep.homogeneous && rep.convex &&
               rep.strictly_curved && rep.bounded;
  return rep;
}

}  // namespace mdev
