#pragma once

#include <cstddef>
#include <vector>

#include "reidfit/distributions.hpp"
#include "reidfit/zone_geometry.hpp"

namespace reidfit {

// Journey-time family x upstream arrival density x survey windows. The
// truncated joint density lives on the observable zone only.
struct JourneyModel {
  JourneyDist journey;
  ArrivalDist arrival;
  SurveyWindows windows;
};

// Checks windows, families, and that the arrival support equals the upstream
// window. Throws DataError on violation.
void validate(const JourneyModel& m);

// Same checks minus the journey parameters (fit entry points supply those).
void validate_geometry(const ArrivalDist& a, const SurveyWindows& w);

// Probability mass of the journey family inside the observable slice at x.
double observable_slice_mass(const JourneyDist& g, const SurveyWindows& w,
                             double x);

// Kinks of the x -> slice integrands inside the upstream window: bound
// transitions, slice closings, empirical-arrival knots. Sorted.
std::vector<double> window_integration_kinks(const SurveyWindows& w,
                                             const ArrivalDist& a);

struct NormalizationResult {
  double value = 0.0;  // observable-zone mass; the expected survivor fraction
  int quadrature_panels = 0;
  double est_abs_error = 0.0;
};

// Interest-box mass split by zone, renormalized over the box.
struct ZoneMasses {
  double early_missed = 0.0;  // zone 1
  double observable = 0.0;    // zone 2
  double late_missed = 0.0;   // zone 3
  double implied_population(std::size_t n_observed) const {
    return static_cast<double>(n_observed) / observable;
  }
};

// Evaluation context for one parameter point: the normalization constant and
// the quadrature kink layout are computed once at construction. Immutable
// afterwards, safe to share across threads.
class TruncatedModel {
 public:
  explicit TruncatedModel(JourneyModel m);

  const JourneyModel& model() const { return model_; }
  const NormalizationResult& normalization() const { return norm_; }

  // Log of the truncated joint density at (x, t); -inf outside the
  // observable zone.
  double log_density(TimeTimePoint p) const;

  // CDF / PDF of the journey-time marginal of the truncated model.
  double marginal_journey_cdf(double t) const;
  double marginal_journey_pdf(double t) const;
  double marginal_journey_quantile(double p) const;

  // Density of the downstream arrival hour under the truncated model; zero
  // outside the downstream window.
  double downstream_arrival_density(double y) const;

  ZoneMasses unobserved_mass() const;

  // Journey times below/above which the marginal CDF is exactly 0/1.
  double journey_support_min() const { return support_min_; }
  double journey_support_max() const { return support_max_; }

 private:
  JourneyModel model_;
  NormalizationResult norm_;
  double log_norm_ = 0.0;
  std::vector<double> x_kinks_;  // quadrature breakpoints inside the window
  double support_min_ = 0.0;
  double support_max_ = 0.0;
};

// Single-use conveniences mirroring the class methods.
NormalizationResult normalization(const JourneyModel& m);
double log_pdf(const JourneyModel& m, TimeTimePoint p);
double marginal_journey_cdf(const JourneyModel& m, double t);
double downstream_arrival_density(const JourneyModel& m, double y);
ZoneMasses unobserved_mass(const JourneyModel& m);

}  // namespace reidfit
