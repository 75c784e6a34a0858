#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mdev/geometry.hpp"
#include "mdev/rng.hpp"

using namespace mdev;

TEST_CASE("ball gauge is the euclidean norm") {
  const OmegaSet ball = OmegaSet::ball(3);
  const auto dirs = sphere_directions(3, 200, 17);
  for (const Vec& v : dirs) {
    for (double c : {0.3, 1.0, 4.2}) {
      CHECK(std::abs(ball.gauge(c * v) - (c * v).norm()) < 1e-14);
    }
  }
}

TEST_CASE("contains: center, boundary, outside") {
  const OmegaSet ball = OmegaSet::ball(2);
  Vec zero = Vec::Zero(2), x(2);
  x << 2.0, 0.0;
  CHECK(contains(ball, zero, 0.5));
  CHECK_FALSE(contains(ball, x, 1.0));
  CHECK(contains(ball, x, 2.0));  // boundary counts as inside
  CHECK_THROWS_AS(contains(ball, zero, 0.0), std::invalid_argument);

  const OmegaSet ell = OmegaSet::ellipsoid({1.0, 2.0});
  Vec y(2);
  y << 0.0, 1.5;
  CHECK(contains(ell, y, 1.0));  // gauge^2 = (1.5/2)^2 = 0.5625
  CHECK(ell.gauge(y) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("contains is monotone in the radius") {
  const OmegaSet ell = OmegaSet::ellipsoid({1.0, 0.5, 2.0});
  const auto dirs = sphere_directions(3, 100, 5);
  for (const Vec& v : dirs) {
    const Vec x = 1.3 * v;
    bool prev = false;
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const bool now = contains(ell, x, r);
      if (prev) CHECK(now);  // once inside, stays inside
      prev = now;
    }
    CHECK(prev);
  }
}

TEST_CASE("gauge properties: homogeneity and subadditivity probes") {
  const OmegaSet ell = OmegaSet::ellipsoid({0.7, 1.9});
  const CounterRng rng(123, 0);
  std::uint64_t k = 0;
  for (int i = 0; i < 10000; ++i) {
    Vec x(2), y(2);
    x << rng.normal(k++), rng.normal(k++);
    y << rng.normal(k++), rng.normal(k++);
    const double c = rng.uniform(k++) * 5.0;
    CHECK(ell.gauge(c * x) == doctest::Approx(c * ell.gauge(x)).epsilon(1e-10));
    CHECK(ell.gauge(x + y) <= ell.gauge(x) + ell.gauge(y) + 1e-10);
    CHECK(ell.gauge(-x) == doctest::Approx(ell.gauge(x)).epsilon(1e-12));
  }
}

TEST_CASE("validate_a4: ball and ellipsoid pass, cube fails strict curvature") {
  CHECK(validate_a4(OmegaSet::ball(2), 400).passes);
  CHECK(validate_a4(OmegaSet::ball(3), 400).passes);
  CHECK(validate_a4(OmegaSet::ellipsoid({1.0, 2.0}), 400).passes);

  const OmegaSet cube =
      OmegaSet::generic(2, [](const Vec& x) { return x.cwiseAbs().maxCoeff(); });
  const A4Report rep = validate_a4(cube, 400);
  CHECK_FALSE(rep.passes);
  CHECK_FALSE(rep.strictly_curved);
  CHECK(rep.witness.has_value());
  // the witness pair really does sit on a flat segment
  const auto& [wx, wy] = *rep.witness;
  CHECK(cube.gauge(0.5 * (wx + wy)) >=
        0.5 * (cube.gauge(wx) + cube.gauge(wy)) - 1e-9);
  CHECK_THROWS_AS(validate_a4(cube, 50), std::invalid_argument);
}

TEST_CASE("affine_image_gauge maps bodies correctly") {
  const OmegaSet ball = OmegaSet::ball(2);
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  const OmegaSet image = affine_image_gauge(ball, diag);
  Vec e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  CHECK(image.gauge(e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(image.gauge(e2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(image.kind == OmegaKind::ellipsoid);
  CHECK(validate_a4(image, 400).passes);

  // composing a map with its inverse restores the gauge
  Mat m(2, 2);
  m << 1.3, 0.4, -0.2, 0.9;
  const OmegaSet round_trip = affine_image_gauge(affine_image_gauge(ball, m),
                                                 m.inverse());
  for (const Vec& v : sphere_directions(2, 100, 3)) {
    CHECK(round_trip.gauge(v) == doctest::Approx(ball.gauge(v)).epsilon(1e-12));
  }

  // identity map on a generic body preserves gauge values
  const OmegaSet cube =
      OmegaSet::generic(2, [](const Vec& x) { return x.cwiseAbs().maxCoeff(); });
  const OmegaSet same = affine_image_gauge(cube, Mat::Identity(2, 2));
  for (const Vec& v : sphere_directions(2, 50, 4))
    CHECK(same.gauge(v) == cube.gauge(v));

  CHECK_THROWS_AS(affine_image_gauge(ball, Mat::Zero(2, 2)),
                  std::invalid_argument);
}
