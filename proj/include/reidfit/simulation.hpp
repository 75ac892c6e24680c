#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "reidfit/dataset.hpp"
#include "reidfit/estimation.hpp"

namespace reidfit {

struct SimConfig {
  SurveyWindows windows;
  JourneyDist journey;
  ArrivalDist arrival;
  std::size_t population = 0;
  std::uint64_t seed = 0;
};

// Exponential journey times configured by their mean, the natural unit for
// survey planning.
JourneyDist exponential_with_mean(double mean_hours);

struct SimVehicle {
  double upstream_time = 0.0;
  double journey_time = 0.0;
  Zone zone = Zone::kOutOfInterest;
};

struct SimulatedSurvey {
  std::vector<SimVehicle> all_vehicles;
  Dataset survivors;  // exactly the observable-zone subset
  double survivor_fraction = 0.0;
  std::array<std::size_t, 5> zone_counts{};  // indexed by zone number - 1
};

// Draws population arrivals from the arrival density and journey times from
// the journey family (shifted by the free-flow time so no vehicle beats it),
// then labels each vehicle by zone. Deterministic given the seed.
SimulatedSurvey simulate_survey(const SimConfig& c);

struct CoverageRecord {
  std::uint64_t replication = 0;
  bool fit_ok = false;
  std::vector<double> theta_hat;
  double mean_hat = 0.0;
  std::optional<ParamInterval> mean_ci;
  std::vector<ParamInterval> theta_ci;
  bool covers_mean = false;
  std::vector<bool> covers_theta;
};

struct CoverageResult {
  int replications = 0;
  int fit_failures = 0;
  double alpha = 0.05;
  double coverage_mean = 0.0;             // NaN when the mean CI is unavailable
  std::vector<double> coverage_theta;     // per parameter; empty on family mismatch
  std::vector<CoverageRecord> records;
};

// R independent simulate -> fit -> Fisher-CI cycles against the truth in the
// config. Fit failures are excluded and counted. Requires R >= 50.
CoverageResult coverage_study(const SimConfig& c, const JourneyDist& fit_family,
                              int replications, double alpha);

}  // namespace reidfit
