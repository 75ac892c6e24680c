#pragma once

#include <cstdint>

#include "reidfit/estimation.hpp"

namespace reidfit {

struct KsReport {
  double d_n = 0.0;
  std::size_t n = 0;
  double alpha = 0.05;
  double critical_value = 0.0;  // c(alpha)/sqrt(n)
  double p_value = 1.0;         // asymptotic Kolmogorov series
  bool reject = false;
};

// One-sample K-S of the observed journey times against the fitted truncated
// marginal CDF.
KsReport ks_test(const Dataset& d, const FitResult& f, double alpha = 0.05);

// Asymptotic critical constant c(alpha): c(0.05) = 1.358, c(0.01) = 1.628.
double ks_critical_constant(double alpha);

// P(K > z) from the alternating Kolmogorov series, 20 terms.
double kolmogorov_asymptotic_p(double z);

struct ReplicateResult {
  Dataset data;
  double acceptance_rate = 0.0;  // independent estimate of the survivor fraction
  std::uint64_t proposals = 0;
};

// Draws n records from the fitted truncated joint density by rejection:
// x from the arrival, t from the journey family, keep observable-zone hits.
// Throws NumericalError when the acceptance rate is below 1e-4 after 1e5
// proposals.
ReplicateResult replicate_dataset(const FitResult& f, std::size_t n,
                                  std::uint64_t seed);

}  // namespace reidfit
