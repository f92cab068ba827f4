#pragma once

namespace gre {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1), absolute error below 1e-9.
/// Acklam's rational approximation followed by one Halley step.
double normal_quantile(double p);

}  // namespace gre
