#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "reidfit/dataset.hpp"
#include "reidfit/truncated_model.hpp"

namespace reidfit {

// Symmetric 1x1 or 2x2 matrix, row-major.
struct InfoMatrix {
  std::size_t dim = 0;
  std::array<double, 4> data{};

  double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
  double& at(std::size_t i, std::size_t j) { return data[i * dim + j]; }
  bool positive_definite() const;
  InfoMatrix inverse() const;  // throws NumericalError when singular
};

struct ParamInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FisherIntervals {
  double alpha = 0.05;
  std::vector<ParamInterval> params;
  // Exponential fits map the rate interval through mean = 1/rate; Weibull
  // fits report no Fisher interval for the mean.
  std::optional<ParamInterval> mean_journey;
};

struct FitResult {
  JourneyModel model;  // journey family carrying the fitted parameters
  std::vector<double> theta;
  double log_likelihood = 0.0;
  double survivor_fraction = 0.0;  // normalization constant at theta-hat
  InfoMatrix observed_info;
  bool info_positive_definite = false;
  std::vector<double> se;
  std::optional<FisherIntervals> ci_fisher;
  bool converged = false;
  int iterations = 0;

  double mean_journey_time() const;
};

// Sum of truncated log densities over the dataset. Empty dataset -> 0.
// Throws NumericalError when the value is not finite or the observable zone
// carries no mass at these parameters.
double total_log_likelihood(const Dataset& d, const JourneyModel& m);

// Gradient of the log-likelihood in the model's parameters. Exponential uses
// the closed form with numerically integrated truncation terms; Weibull uses
// central differences with step 1e-6 * max(1, |theta_j|).
std::vector<double> score(const Dataset& d, const JourneyModel& m);

// Negative Hessian of the log-likelihood at the model's parameters,
// symmetrized. Weibull entries come from central second differences with
// step 1e-4 * max(1, |theta_j|).
InfoMatrix observed_information(const Dataset& d, const JourneyModel& m);

FitResult fit_mle(const Dataset& d, const JourneyModel& m,
                  std::optional<std::vector<double>> init = std::nullopt);

FisherIntervals fisher_ci(const FitResult& f, double alpha);

// Scale-only Weibull fit with the shape pinned; the reported information is
// the one-parameter (scale) observed information.
FitResult fit_mle_fixed_shape(const Dataset& d, const JourneyModel& m,
                              double shape);

}  // namespace reidfit
