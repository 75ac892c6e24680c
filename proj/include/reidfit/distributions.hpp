#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reidfit/rng.hpp"

namespace reidfit {

// --- journey-time families -------------------------------------------------

struct Exponential {
  double rate = 1.0;  // events per hour; mean = 1/rate
};

struct Weibull {
  double shape = 1.0;  // k
  double scale = 1.0;  // lambda, hours
};

using JourneyDist = std::variant<Exponential, Weibull>;

void validate(const JourneyDist& d);

double pdf(const JourneyDist& d, double t);
double log_pdf(const JourneyDist& d, double t);
double cdf(const JourneyDist& d, double t);
// 1 - cdf computed as exp(-cumulative hazard); keeps precision deep in the
// tail where cdf differences would cancel.
double survival(const JourneyDist& d, double t);
double mean(const JourneyDist& d);
double quantile(const JourneyDist& d, double p);

// Inverse-CDF draw; one uniform per draw, so Weibull(shape 1, scale s) and
// Exponential(rate 1/s) walk the same path on the same stream.
double sample(const JourneyDist& d, RngStream& rng);
std::vector<double> sample(const JourneyDist& d, RngStream& rng, std::size_t n);

std::size_t param_count(const JourneyDist& d);
std::vector<double> params(const JourneyDist& d);
std::vector<std::string> param_names(const JourneyDist& d);
JourneyDist with_params(const JourneyDist& d, std::span<const double> theta);
const char* family_name(const JourneyDist& d);
double mean_from_params(const JourneyDist& family, std::span<const double> theta);

// --- upstream arrival densities ---------------------------------------------

struct UniformArrival {
  double start = 0.0;
  double end = 1.0;
};

// Piecewise-linear density on ascending knots spanning the upstream window.
// Nonnegative, trapezoid integral 1.
struct EmpiricalArrival {
  std::vector<double> times;
  std::vector<double> densities;
};

using ArrivalDist = std::variant<UniformArrival, EmpiricalArrival>;

void validate(const ArrivalDist& a);

double arrival_pdf(const ArrivalDist& a, double x);
// Exact integral of the arrival density over [lo, hi] (clipped to support).
double arrival_mass(const ArrivalDist& a, double lo, double hi);
double arrival_support_start(const ArrivalDist& a);
double arrival_support_end(const ArrivalDist& a);
const char* arrival_name(const ArrivalDist& a);

// Inverse-CDF sampler; the empirical CDF segments are precomputed once.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(const ArrivalDist& a);
  double operator()(RngStream& rng) const;

 private:
  double start_ = 0.0;
  double end_ = 0.0;
  std::vector<double> times_;
  std::vector<double> densities_;
  std::vector<double> cumulative_;  // empty for the uniform case
};

// Histogram of the upstream arrival times on uniform bins over the window,
// linearly interpolated at bin centers, clamped nonnegative and renormalized
// to unit integral. Throws DataError when no arrival falls in the window.
EmpiricalArrival build_empirical_arrival(std::span<const double> upstream_times,
                                         double window_start, double window_end,
                                         double bin_width = 0.25);

}  // namespace reidfit
