#pragma once

// Standard normal CDF, log-CDF, quantile and chi-square tails at the
// precision the moderate-deviation comparisons need: Phi(x) keeps full
// relative accuracy down to Phi(-37) and the log form stays finite far
// beyond the double underflow point.

namespace mdev {

// Phi(x) via the complementary error function. Relative error is a few
// ulp of erfc, comfortably below 1e-13 for x >= -37.
double normal_cdf(double x);

// log Phi(x), finite for all representable x. Uses erfc down to x = -37
// and the Mills-ratio asymptotic expansion below that.
double log_normal_cdf(double x);

// Upper tail Phi(-x) = P(Z > x), kept separate to avoid 1 - Phi cancellation.
double normal_sf(double x);

// Lower quantile: the x with Phi(x) = alpha, relative precision ~1e-14.
// Negative for alpha < 1/2.
double normal_quantile(double alpha);

// Rational-approximation inverse CDF (Acklam), relative error ~1.2e-9.
// This is the sampling transform; use normal_quantile for analysis.
double fast_normal_quantile(double p);

// P(chi^2_d > x) for d >= 1, by upward recurrence from the d=1,2 closed
// forms. Exact to a few ulp for the small d used here.
double chi_square_sf(int d, double x);

}  // namespace mdev
