#pragma once

#include <cstddef>
#include <vector>

#include "reidfit/zone_geometry.hpp"

namespace reidfit {

// One re-identified vehicle.
struct ReidRecord {
  double upstream_time = 0.0;  // x, hours of day
  double journey_time = 0.0;   // t, hours
};

// Records plus the windows they were observed under. Ingestion guarantees
// every record classifies to the observable zone.
struct Dataset {
  std::vector<ReidRecord> records;
  SurveyWindows windows;
};

// Indices of records that do not classify to the observable zone.
std::vector<std::size_t> zone_violations(const Dataset& d);

}  // namespace reidfit
