#include "mdev/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdev {

namespace {

constexpr double kEigenFloorRel = 1e-10;
constexpr double kSlopeTolerance = 0.25;
constexpr double kNoiseFloorRel = 1e-12;
constexpr double kPi = 3.14159265358979323846;

Vec constant_vec(int d, double v) { return Vec::Constant(d, v); }

// Central-difference step per coordinate.
double fd_step(double theta_k) { return std::max(1e-5, 1e-5 * std::abs(theta_k)); }

std::vector<Vec> probe_directions(int d) {
  std::vector<Vec> dirs;
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e[k] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (d > 1) {
    // sign diagonals, capped so the probe set stays small
    const int m = std::min(d, 3);
    for (int mask = 0; mask < (1 << m); ++mask) {
      Vec e = Vec::Zero(d);
      for (int k = 0; k < m; ++k) e[k] = (mask >> k) & 1 ? -1.0 : 1.0;
      e.normalize();
      dirs.push_back(e);
    }
  }
  return dirs;
}

// Least-squares slope of ln(resid) against ln(r).
double loglog_slope(const std::vector<double>& r, const std::vector<double>& y) {
  const int n = static_cast<int>(r.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(r[i]), v = std::log(y[i]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

bool SignalModel::in_domain(const Vec& theta) const {
  if (theta.size() != dim) return false;
  for (int k = 0; k < dim; ++k)
    if (theta[k] < lo[k] || theta[k] > hi[k]) return false;
  return true;
}

void SignalModel::require_in_domain(const Vec& theta) const {
  if (!in_domain(theta))
    throw std::domain_error("parameter outside the domain of model '" + name + "'");
}

SignalModel make_model(const std::string& name, const ModelParams& params) {
  SignalModel m;
  m.name = name;
  m.lambda = params.lambda;
  if (name == "linear-sin") {
    m.dim = 1;
    m.lo = constant_vec(1, -50.0);
    m.hi = constant_vec(1, 50.0);
    m.signal = [](double t, const Vec& th) {
      return th[0] * std::sqrt(2.0) * std::sin(kPi * t);
    };
    m.score = [](double t, const Vec&) {
      Vec s(1);
      s[0] = std::sqrt(2.0) * std::sin(kPi * t);
      return s;
    };
  } else if (name == "nonlinear-sin") {
    m.dim = 1;
    m.lo = constant_vec(1, -50.0);
    m.hi = constant_vec(1, 50.0);
    m.signal = [](double t, const Vec& th) { return std::sin(th[0] * t); };
    m.score = [](double t, const Vec& th) {
      Vec s(1);
      s[0] = t * std::cos(th[0] * t);
      return s;
    };
  } else if (name == "ortho-2d") {
    m.dim = 2;
    m.lo = constant_vec(2, -50.0);
    m.hi = constant_vec(2, 50.0);
    m.signal = [](double t, const Vec& th) {
      return th[0] * std::sqrt(2.0) * std::sin(kPi * t) +
             th[1] * std::sqrt(2.0) * std::sin(2.0 * kPi * t);
    };
    m.score = [](double t, const Vec&) {
      Vec s(2);
      s[0] = std::sqrt(2.0) * std::sin(kPi * t);
      s[1] = std::sqrt(2.0) * std::sin(2.0 * kPi * t);
      return s;
    };
  } else if (name == "power-cusp") {
    const double gamma = params.gamma;
    m.dim = 1;
    m.lo = constant_vec(1, -5.0);
    m.hi = constant_vec(1, 5.0);
    m.signal = [gamma](double t, const Vec& th) {
      return std::pow(std::abs(th[0]), 1.0 + gamma) * std::sqrt(2.0) *
             std::sin(kPi * t);
    };
    m.score = [gamma](double t, const Vec& th) {
      Vec s(1);
      const double a = std::abs(th[0]);
      const double d = a == 0.0 ? 0.0
                                : (1.0 + gamma) * std::pow(a, gamma) *
                                      (th[0] > 0.0 ? 1.0 : -1.0);
      s[0] = d * std::sqrt(2.0) * std::sin(kPi * t);
      return s;
    };
  } else {
    throw std::invalid_argument("unknown model '" + name + "'");
  }
  return m;
}

std::vector<std::string> registered_models() {
  return {"linear-sin", "nonlinear-sin", "ortho-2d", "power-cusp"};
}

std::vector<double> eval_signal(const SignalModel& model, const Vec& theta,
                                const Grid& grid) {
  model.require_in_domain(theta);
  std::vector<double> out(grid.n);
  for (int i = 0; i < grid.n; ++i) out[i] = model.signal(grid.nodes[i], theta);
  return out;
}

std::vector<std::vector<double>> eval_score(const SignalModel& model,
                                            const Vec& theta0, const Grid& grid) {
  model.require_in_domain(theta0);
  std::vector<std::vector<double>> rows(model.dim, std::vector<double>(grid.n));
  if (model.score) {
    for (int i = 0; i < grid.n; ++i) {
      const Vec s = model.score(grid.nodes[i], theta0);
      for (int k = 0; k < model.dim; ++k) rows[k][i] = s[k];
    }
    return rows;
  }
  for (int k = 0; k < model.dim; ++k) {
    const double h = fd_step(theta0[k]);
    Vec tp = theta0, tm = theta0;
    tp[k] += h;
    tm[k] -= h;
    if (!model.in_domain(tp) || !model.in_domain(tm))
      throw std::domain_error(
          "eval_score: theta0 too close to the domain boundary for the "
          "finite-difference stencil");
    for (int i = 0; i < grid.n; ++i) {
      const double t = grid.nodes[i];
      rows[k][i] = (model.signal(t, tp) - model.signal(t, tm)) / (2.0 * h);
    }
  }
  return rows;
}

Mat fisher_matrix_raw(const SignalModel& model, const Vec& theta0, const Grid& grid) {
  const auto rows = eval_score(model, theta0, grid);
  Mat info(model.dim, model.dim);
  for (int j = 0; j < model.dim; ++j)
    for (int k = j; k < model.dim; ++k) {
      const double v = quad_inner(grid, rows[j], rows[k]);
      info(j, k) = v;
      info(k, j) = v;
    }
  return info;
}

FisherMatrix fisher_information(const SignalModel& model, const Vec& theta0,
                                const Grid& grid) {
  FisherMatrix f;
  f.theta0 = theta0;
  f.matrix = fisher_matrix_raw(model, theta0, grid);
  Eigen::SelfAdjointEigenSolver<Mat> es(f.matrix);
  const Vec ev = es.eigenvalues();
  const double floor = kEigenFloorRel * std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() <= floor || ev.maxCoeff() <= 0.0)
    throw singular_information_error("Fisher information is numerically singular at "
                                     "the requested point (model '" +
                                     model.name + "')");
  const Vec root = ev.array().sqrt();
  f.sqrt = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  f.inv_sqrt = es.eigenvectors() * root.cwiseInverse().asDiagonal() *
               es.eigenvectors().transpose();
  return f;
}

double rho_distance(const SignalModel& model, const Vec& theta1, const Vec& theta0,
                    const Grid& grid) {
  const auto s1 = eval_signal(model, theta1, grid);
  const auto s0 = eval_signal(model, theta0, grid);
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double d = s1[i] - s0[i];
    acc += grid.weights[i] * d * d;
  }
  return std::sqrt(acc);
}

double score_shift_covariance(const SignalModel& model, const Vec& theta0,
                              const Vec& h, const Vec& u, const Grid& grid) {
  const Vec shifted = theta0 + h;
  model.require_in_domain(theta0);
  model.require_in_domain(shifted);
  const auto rows0 = eval_score(model, theta0, grid);
  const auto rowsh = eval_score(model, shifted, grid);
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    double d = 0.0;
    for (int k = 0; k < model.dim; ++k) d += u[k] * (rows0[k][i] - rowsh[k][i]);
    acc += grid.weights[i] * d * d;
  }
  return acc;
}

RegularityReport check_regularity(const SignalModel& model, const Vec& theta0,
                                  const Grid& grid, const std::vector<double>& radii) {
  model.require_in_domain(theta0);
  if (radii.size() < 2)
    throw std::invalid_argument("check_regularity: need at least two radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]) || radii[i] <= 0.0)
      throw std::invalid_argument("check_regularity: radii must be positive and "
                                  "strictly decreasing");

  RegularityReport rep;
  rep.radii = radii;

  const auto s0 = eval_signal(model, theta0, grid);
  const auto rows0 = eval_score(model, theta0, grid);
  const Mat info0 = fisher_matrix_raw(model, theta0, grid);
  const auto dirs = probe_directions(model.dim);

  const double scale = std::max(1.0, quad_norm2(grid, s0));
  const double floor = kNoiseFloorRel * scale;

  for (double r : radii) {
    double r12 = 0.0, r14 = 0.0, r15 = 0.0;
    for (const Vec& e : dirs) {
      const Vec th = theta0 + r * e;
      if (!model.in_domain(th))
        throw std::domain_error("check_regularity: probe radius leaves the domain");
      const auto s = eval_signal(model, th, grid);
      // (1.3): || S(th) - S(th0) - (th-th0)'S_theta ||^2
      double lin = 0.0, rho2 = 0.0;
      for (int i = 0; i < grid.n; ++i) {
        double proj = 0.0;
        for (int k = 0; k < model.dim; ++k) proj += r * e[k] * rows0[k][i];
        const double diff = s[i] - s0[i];
        lin += grid.weights[i] * (diff - proj) * (diff - proj);
        rho2 += grid.weights[i] * diff * diff;
      }
      r12 = std::max(r12, lin);
      // (1.4): | rho^2 - u'I(theta0)u |
      const Vec u = r * e;
      r14 = std::max(r14, std::abs(rho2 - u.dot(info0 * u)));
      // (1.5): | v'I(th)v - v'I(th0)v | over unit v
      const Mat info = fisher_matrix_raw(model, th, grid);
      const Mat delta = info - info0;
      for (const Vec& v : dirs) {
        if (v.norm() == 0.0) continue;
        const Vec vn = v.normalized();
        r15 = std::max(r15, std::abs(vn.dot(delta * vn)));
      }
    }
    rep.residual_12.push_back(r12);
    rep.residual_14.push_back(r14);
    rep.residual_15.push_back(r15);
  }

  // A1 at theta0
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(info0);
    const Vec ev = es.eigenvalues();
    rep.passes_a1 =
        ev.maxCoeff() > 0.0 && ev.minCoeff() > kEigenFloorRel * ev.maxCoeff();
  }

  const auto fit_family = [&](const std::vector<double>& resid, double target,
                              double& order, bool& resolved) {
    std::vector<double> rr, yy;
    for (size_t i = 0; i < resid.size(); ++i)
      if (resid[i] > floor) {
        rr.push_back(radii[i]);
        yy.push_back(resid[i]);
      }
    if (rr.size() < 4) {
      // noise-dominated: the bound holds vacuously at this resolution
      order = std::numeric_limits<double>::quiet_NaN();
      resolved = false;
      return true;
    }
    order = loglog_slope(rr, yy);
    resolved = true;
    return order >= target - kSlopeTolerance;
  };

  const double t2 = 2.0 + model.lambda;
  const bool ok12 = fit_family(rep.residual_12, t2, rep.order_12, rep.resolved_12);
  const bool ok14 = fit_family(rep.residual_14, t2, rep.order_14, rep.resolved_14);
  const bool ok15 =
      fit_family(rep.residual_15, model.lambda, rep.order_15, rep.resolved_15);
  rep.passes_a2 = ok12 && ok14;
  rep.passes_a3 = ok15;
  return rep;
}

}  // namespace mdev
