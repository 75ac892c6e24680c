#include "reidfit/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reidfit/errors.hpp"
#include "reidfit/rng.hpp"
#include "reidfit/stats.hpp"

namespace reidfit {

BootstrapResult bootstrap_ci(const Dataset& d, const FitResult& baseline,
                             const BootstrapSpec& spec) {
  if (d.records.empty()) throw DataError("bootstrap requires a non-empty dataset");
  if (spec.resamples < 100) {
    throw DataError("bootstrap needs at least 100 resamples for intervals");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw DataError("bootstrap alpha must lie in (0, 1)");
  }
  if (!baseline.converged) {
    throw DataError("bootstrap requires a converged baseline fit");
  }

  const std::size_t n = d.records.size();
  const std::size_t n_params = baseline.theta.size();
  const std::size_t n_stats = n_params + 1;  // parameters, then the mean

  BootstrapResult out;
  out.alpha = spec.alpha;
  out.resamples = spec.resamples;
  out.statistic_names = param_names(baseline.model.journey);
  out.statistic_names.push_back("mean_journey_time");
  out.replicates.assign(n_stats, {});

  Dataset resample;
  resample.windows = d.windows;
  resample.records.resize(n);

  for (int rep = 0; rep < spec.resamples; ++rep) {
    RngStream rng = RngStream::substream(spec.master_seed,
                                         static_cast<std::uint64_t>(rep));
    for (std::size_t i = 0; i < n; ++i) {
      resample.records[i] = d.records[rng.uniform_index(n)];
    }
    bool ok = false;
    try {
      const FitResult refit =
          fit_mle(resample, baseline.model, baseline.theta);
      if (refit.converged) {
        for (std::size_t j = 0; j < n_params; ++j) {
          out.replicates[j].push_back(refit.theta[j]);
        }
        out.replicates[n_params].push_back(refit.mean_journey_time());
        ok = true;
      }
    } catch (const NumericalError&) {
      // counted below
    }
    if (!ok) ++out.refit_failures;
  }

  if (out.refit_failures * 5 > spec.resamples) {
    std::ostringstream oss;
    oss << "bootstrap: " << out.refit_failures << " of " << spec.resamples
        << " refits failed (more than 20%)";
    throw NumericalError(oss.str());
  }

  std::vector<double> point(baseline.theta);
  point.push_back(baseline.mean_journey_time());
  out.intervals.reserve(n_stats);
  out.point_estimate_outside.reserve(n_stats);
  for (std::size_t j = 0; j < n_stats; ++j) {
    std::vector<double> sorted = out.replicates[j];
    std::sort(sorted.begin(), sorted.end());
    const ParamInterval iv{quantile_sorted(sorted, spec.alpha / 2.0),
                           quantile_sorted(sorted, 1.0 - spec.alpha / 2.0)};
    out.intervals.push_back(iv);
    out.point_estimate_outside.push_back(point[j] < iv.lo || point[j] > iv.hi);
  }
  return out;
}

}  // namespace reidfit
