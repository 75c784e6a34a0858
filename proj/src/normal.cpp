#include "mdev/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdev {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Mills-ratio series for log Phi(x), x << 0:
//   Phi(x) = phi(|x|)/|x| * (1 - 1/y^2 + 3/y^4 - 15/y^6 + ...)
double log_cdf_asymptotic(double x) {
  const double y = -x;
  const double y2 = y * y;
  double term = 1.0, series = 0.0;
  // (2k-1)!! / y^(2k), alternating; y >= 37 so five terms reach ~1e-15.
  for (int k = 1; k <= 5; ++k) {
    term *= -(2.0 * k - 1.0) / y2;
    series += term;
  }
  return -0.5 * y2 - std::log(y) - kLogSqrt2Pi + std::log1p(series);
}

// Acklam's rational approximation to the inverse normal CDF.
double acklam_inverse(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double log_normal_cdf(double x) {
  if (x < -37.0) return log_cdf_asymptotic(x);
  if (x > 8.0) {
    // log(1 - Phi(-x)); the tail is tiny, log1p keeps full precision.
    return std::log1p(-normal_sf(x));
  }
  return std::log(0.5 * std::erfc(-x / kSqrt2));
}

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("normal_quantile: alpha must lie in (0,1)");
  if (alpha == 0.5) return 0.0;
  if (alpha > 0.5) return -normal_quantile(1.0 - alpha);

  // Newton iterations on log Phi(x) = log alpha. The derivative
  // d/dx log Phi = phi/Phi = exp(log phi - log Phi) is finite for every
  // representable alpha, so the same loop covers extreme tails.
  double x = acklam_inverse(alpha);
  const double target = std::log(alpha);
  for (int it = 0; it < 3; ++it) {
    const double lf = log_normal_cdf(x);
    const double lpdf = -0.5 * x * x - kLogSqrt2Pi;
    x -= (lf - target) * std::exp(lf - lpdf);
  }
  return x;
}

double fast_normal_quantile(double p) { return acklam_inverse(p); }

double chi_square_sf(int d, double x) {
  if (d < 1) throw std::domain_error("chi_square_sf: d must be >= 1");
  if (x <= 0.0) return 1.0;
  const double h = 0.5 * x;
  // Q_1, Q_2 closed forms; Q_{k+2} = Q_k + (h^{k/2} e^{-h}) / Gamma(k/2+1).
  double q, term;
  int k;
  if (d % 2 == 1) {
    q = std::erfc(std::sqrt(h));
    term = std::exp(-h) * std::sqrt(h) * 2.0 / std::sqrt(M_PI);  // k = 1
    k = 1;
  } else {
    q = std::exp(-h);
    term = std::exp(-h) * h;  // k = 2
    k = 2;
  }
  while (k + 2 <= d) {
    q += term;
    k += 2;
    term *= h / (0.5 * k);
  }
  return q;
}

}  // namespace mdev
