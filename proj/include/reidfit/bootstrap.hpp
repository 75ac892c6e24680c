#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reidfit/estimation.hpp"

namespace reidfit {

struct BootstrapSpec {
  int resamples = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
};

// Percentile intervals for every fitted parameter plus the mean journey
// time. Replicate values cover converged refits only.
struct BootstrapResult {
  std::vector<std::string> statistic_names;
  std::vector<ParamInterval> intervals;
  std::vector<std::vector<double>> replicates;  // [statistic][replicate]
  // Set when the baseline point estimate falls outside its own interval;
  // flagged rather than treated as a failure.
  std::vector<bool> point_estimate_outside;
  int resamples = 0;
  int refit_failures = 0;
  double alpha = 0.05;
};

// Resamples the records with replacement (replicate size = n), refits from
// the baseline estimate, and takes empirical (alpha/2, 1-alpha/2) quantiles.
// Replicate j draws from a stream derived from (master_seed, j), so results
// are independent of evaluation order. Throws NumericalError when more than
// 20% of the refits fail.
BootstrapResult bootstrap_ci(const Dataset& d, const FitResult& baseline,
                             const BootstrapSpec& spec);

}  // namespace reidfit
