#pragma once

#include <optional>

namespace reidfit {

// Recording intervals of the two stations plus the physical journey-time box.
// Times are decimal hours from local midnight of the survey day; journeys
// crossing midnight simply run above 24.
struct SurveyWindows {
  double upstream_start = 0.0;    // x_s
  double upstream_end = 0.0;      // x_e
  double downstream_start = 0.0;  // y_s
  double downstream_end = 0.0;    // y_e
  double free_flow_time = 0.0;    // shortest physically possible journey
  double max_journey = 24.0;      // cap of the interest box
};

// Throws DataError unless the windows are ordered and the observable zone has
// positive width somewhere.
void validate(const SurveyWindows& w);

// Taxonomy of the time-time plane. Numbering is part of the file formats.
enum class Zone : int {
  kEarlyMissed = 1,    // in the interest box, arrives downstream too early
  kObservable = 2,     // re-identifiable at both stations
  kLateMissed = 3,     // in the interest box, arrives downstream too late
  kOutOfInterest = 4,  // outside upstream hours or journey beyond the cap
  kInfeasible = 5,     // faster than free flow; cannot occur
};

constexpr int zone_number(Zone z) { return static_cast<int>(z); }
const char* zone_name(Zone z);

// Upstream-centric coordinates: arrival hour at the upstream station and the
// journey duration. Downstream arrival is upstream_time + journey_time.
struct TimeTimePoint {
  double upstream_time = 0.0;
  double journey_time = 0.0;
};

struct JourneyBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Observable journey-time slice for a vehicle arriving upstream at x; absent
// outside the upstream window or when the slice is empty.
std::optional<JourneyBounds> bounds_at(const SurveyWindows& w, double x);

// Boundaries are closed toward the observable zone: a vehicle timestamped
// exactly at a window edge counts as recorded.
Zone classify(const SurveyWindows& w, TimeTimePoint p);

// 45-degree shear between the upstream- and downstream-centric views.
TimeTimePoint to_downstream_view(TimeTimePoint p);
TimeTimePoint from_downstream_view(TimeTimePoint p);

}  // namespace reidfit
