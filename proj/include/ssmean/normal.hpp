#pragma once

namespace ssmean {

double normal_cdf(double x);

/// Standard normal inverse CDF: rational approximation followed by one Halley
/// correction step, good to roughly machine precision on (0, 1).
double normal_quantile(double p);

/// z_{1 - alpha/2}; throws InvalidArgs unless alpha is in (0, 1).
double z_two_sided(double alpha);

}  // namespace ssmean
