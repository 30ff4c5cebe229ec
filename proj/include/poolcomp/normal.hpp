#pragma once

namespace poolcomp {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, computed from std::erfc (absolute error well below 1e-12).
double normal_cdf(double x);

/// Upper tail 1 - Phi(x) without cancellation for large x.
double normal_sf(double x);

/// Two-sided p-value 2 * (1 - Phi(|z|)).
double two_sided_p(double z);

/// Quantile of the standard normal. Rational starting point refined with a
/// Halley step; |Phi(z) - p| is at rounding level on [1e-12, 1 - 1e-12].
/// Throws InputError unless 0 < p < 1.
double inverse_normal_cdf(double p);

}  // namespace poolcomp
