#include "reidfit/zone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reidfit/errors.hpp"

namespace reidfit {

namespace {

double slice_width(const SurveyWindows& w, double x) {
  const double lower = std::max(w.free_flow_time, w.downstream_start - x);
  const double upper = std::min(w.max_journey, w.downstream_end - x);
  return upper - lower;
}

}  // namespace

void validate(const SurveyWindows& w) {
  std::ostringstream oss;
  if (!(w.upstream_start < w.upstream_end)) {
    oss << "upstream window is empty: [" << w.upstream_start << ", "
        << w.upstream_end << "]";
    throw DataError(oss.str());
  }
  if (!(w.downstream_start < w.downstream_end)) {
    oss << "downstream window is empty: [" << w.downstream_start << ", "
        << w.downstream_end << "]";
    throw DataError(oss.str());
  }
  if (!(w.free_flow_time >= 0.0 && w.free_flow_time < w.max_journey)) {
    oss << "journey-time box must satisfy 0 <= free_flow_time < max_journey, got ["
        << w.free_flow_time << ", " << w.max_journey << "]";
    throw DataError(oss.str());
  }
  // The slice width is piecewise linear in x, so its maximum over the
  // upstream window sits at an endpoint or at one of the two kinks.
  double best = std::max(slice_width(w, w.upstream_start),
                         slice_width(w, w.upstream_end));
  for (double kink : {w.downstream_start - w.free_flow_time,
                      w.downstream_end - w.max_journey}) {
    if (kink > w.upstream_start && kink < w.upstream_end) {
      best = std::max(best, slice_width(w, kink));
    }
  }
  if (!(best > 0.0)) {
    throw DataError("observable zone is empty for these windows");
  }
}

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::kEarlyMissed:
      return "early_missed";
    case Zone::kObservable:
      return "observable";
    case Zone::kLateMissed:
      return "late_missed";
    case Zone::kOutOfInterest:
      return "out_of_interest";
    case Zone::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

std::optional<JourneyBounds> bounds_at(const SurveyWindows& w, double x) {
  if (x < w.upstream_start || x > w.upstream_end) return std::nullopt;
  const double lower = std::max(w.free_flow_time, w.downstream_start - x);
  const double upper = std::min(w.max_journey, w.downstream_end - x);
  if (lower >= upper) return std::nullopt;
  return JourneyBounds{lower, upper};
}

Zone classify(const SurveyWindows& w, TimeTimePoint p) {
  if (p.journey_time < w.free_flow_time) return Zone::kInfeasible;
  if (p.upstream_time < w.upstream_start || p.upstream_time > w.upstream_end ||
      p.journey_time > w.max_journey) {
    return Zone::kOutOfInterest;
  }
  const double downstream = p.upstream_time + p.journey_time;
  if (downstream < w.downstream_start) return Zone::kEarlyMissed;
  if (downstream > w.downstream_end) return Zone::kLateMissed;
  return Zone::kObservable;
}

TimeTimePoint to_downstream_view(TimeTimePoint p) {
  return {p.upstream_time + p.journey_time, p.journey_time};
}

TimeTimePoint from_downstream_view(TimeTimePoint p) {
  return {p.upstream_time - p.journey_time, p.journey_time};
}

}  // namespace reidfit
