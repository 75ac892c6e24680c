#include "reidfit/simulation.hpp"

#include <cmath>
#include <limits>

#include "reidfit/errors.hpp"
#include "reidfit/rng.hpp"

namespace reidfit {

JourneyDist exponential_with_mean(double mean_hours) {
  if (!(mean_hours > 0.0)) {
    throw DataError("exponential mean journey time must be > 0");
  }
  return Exponential{1.0 / mean_hours};
}

SimulatedSurvey simulate_survey(const SimConfig& c) {
  validate(c.windows);
  validate(c.journey);
  validate(c.arrival);

  SimulatedSurvey survey;
  survey.all_vehicles.reserve(c.population);
  survey.survivors.windows = c.windows;

  RngStream rng(c.seed);
  const ArrivalSampler draw_arrival(c.arrival);
  const double shift = c.windows.free_flow_time;

  for (std::size_t i = 0; i < c.population; ++i) {
    const double x = draw_arrival(rng);
    const double t = shift + sample(c.journey, rng);
    const Zone zone = classify(c.windows, {x, t});
    survey.all_vehicles.push_back({x, t, zone});
    ++survey.zone_counts[static_cast<std::size_t>(zone_number(zone)) - 1];
    if (zone == Zone::kObservable) {
      survey.survivors.records.push_back({x, t});
    }
  }
  survey.survivor_fraction =
      c.population == 0
          ? 0.0
          : static_cast<double>(survey.survivors.records.size()) /
                static_cast<double>(c.population);
  return survey;
}

CoverageResult coverage_study(const SimConfig& c, const JourneyDist& fit_family,
                              int replications, double alpha) {
  if (replications < 50) {
    throw DataError("coverage_study requires at least 50 replications");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("coverage_study alpha must lie in (0, 1)");
  }

  const double true_mean = mean(c.journey);
  const std::vector<double> true_theta = params(c.journey);
  const bool same_family = c.journey.index() == fit_family.index();

  CoverageResult out;
  out.replications = replications;
  out.alpha = alpha;
  if (same_family) out.coverage_theta.assign(true_theta.size(), 0.0);

  int mean_hits = 0;
  int mean_total = 0;
  std::vector<int> theta_hits(true_theta.size(), 0);
  int theta_total = 0;

  for (int rep = 0; rep < replications; ++rep) {
    CoverageRecord record;
    record.replication = static_cast<std::uint64_t>(rep);

    SimConfig rep_config = c;
    rep_config.seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep));
    const SimulatedSurvey survey = simulate_survey(rep_config);

    try {
      JourneyModel model{fit_family, c.arrival, c.windows};
      const FitResult fit = fit_mle(survey.survivors, model);
      if (!fit.converged || !fit.info_positive_definite) {
        throw NumericalError("replication fit did not converge");
      }
      const FisherIntervals ci = fisher_ci(fit, alpha);
      record.fit_ok = true;
      record.theta_hat = fit.theta;
      record.mean_hat = fit.mean_journey_time();
      record.theta_ci = ci.params;
      record.mean_ci = ci.mean_journey;
      if (ci.mean_journey) {
        ++mean_total;
        record.covers_mean = ci.mean_journey->lo <= true_mean &&
                             true_mean <= ci.mean_journey->hi;
        if (record.covers_mean) ++mean_hits;
      }
      if (same_family) {
        ++theta_total;
        record.covers_theta.resize(true_theta.size());
        for (std::size_t j = 0; j < true_theta.size(); ++j) {
          record.covers_theta[j] = ci.params[j].lo <= true_theta[j] &&
                                   true_theta[j] <= ci.params[j].hi;
          if (record.covers_theta[j]) ++theta_hits[j];
        }
      }
    } catch (const NumericalError&) {
      record.fit_ok = false;
      ++out.fit_failures;
    }
    out.records.push_back(std::move(record));
  }

  out.coverage_mean =
      mean_total > 0 ? static_cast<double>(mean_hits) / mean_total
                     : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < out.coverage_theta.size(); ++j) {
    out.coverage_theta[j] =
        theta_total > 0 ? static_cast<double>(theta_hits[j]) / theta_total
                        : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace reidfit
