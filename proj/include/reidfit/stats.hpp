#pragma once

#include <span>

namespace reidfit {

double normal_cdf(double x);

// Inverse standard normal CDF. Rational initial guess polished with two
// Halley steps; relative error well below 1e-9. Throws DataError outside
// (0, 1).
double normal_quantile(double p);

// Linear-interpolation quantile (type 7) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

double mean_of(std::span<const double> v);

}  // namespace reidfit
