#pragma once

#include <stdexcept>

namespace reidfit {

// Problems with user-supplied input: malformed rows, empty datasets,
// inconsistent windows, bad configuration.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures: degenerate observable zone, non-convergence where a
// result is required, runaway rejection sampling.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reidfit
