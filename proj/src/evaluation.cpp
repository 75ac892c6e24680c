#include "reidfit/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "reidfit/errors.hpp"
#include "reidfit/rng.hpp"

namespace reidfit {

double ks_critical_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("ks critical constant: alpha must lie in (0, 1)");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double kolmogorov_asymptotic_p(double z) {
  // Below z ~ 0.18 the 20-term truncation error exceeds the distance of the
  // true tail mass from 1, which is under 1e-12 there.
  if (z < 0.18) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 20; ++j) {
    sum += sign * std::exp(-2.0 * j * j * z * z);
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsReport ks_test(const Dataset& d, const FitResult& f, double alpha) {
  if (!f.converged) throw DataError("ks_test requires a converged fit");
  if (d.records.empty()) throw DataError("ks_test requires data");

  std::vector<double> times;
  times.reserve(d.records.size());
  for (const ReidRecord& r : d.records) times.push_back(r.journey_time);
  std::sort(times.begin(), times.end());

  const TruncatedModel model(f.model);
  const double n = static_cast<double>(times.size());
  double d_n = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double fitted = model.marginal_journey_cdf(times[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - fitted;
    const double lo = fitted - static_cast<double>(i) / n;
    d_n = std::max({d_n, std::abs(hi), std::abs(lo)});
  }

  KsReport report;
  report.d_n = d_n;
  report.n = times.size();
  report.alpha = alpha;
  report.critical_value = ks_critical_constant(alpha) / std::sqrt(n);
  report.p_value = kolmogorov_asymptotic_p(std::sqrt(n) * d_n);
  report.reject = d_n > report.critical_value;
  return report;
}

ReplicateResult replicate_dataset(const FitResult& f, std::size_t n,
                                  std::uint64_t seed) {
  if (!f.converged) throw DataError("replicate_dataset requires a converged fit");

  ReplicateResult out;
  out.data.windows = f.model.windows;
  out.data.records.reserve(n);

  RngStream rng(seed);
  const ArrivalSampler draw_arrival(f.model.arrival);
  std::uint64_t accepted = 0;

  while (accepted < n) {
    const double x = draw_arrival(rng);
    const double t = sample(f.model.journey, rng);
    ++out.proposals;
    if (classify(f.model.windows, {x, t}) == Zone::kObservable) {
      out.data.records.push_back({x, t});
      ++accepted;
    }
    if (out.proposals >= 100000 && accepted < out.proposals / 10000) {
      throw NumericalError(
          "replicate_dataset: acceptance rate below 1e-4 after 1e5 proposals");
    }
  }
  out.acceptance_rate =
      out.proposals > 0
          ? static_cast<double>(accepted) / static_cast<double>(out.proposals)
          : 0.0;
  return out;
}

}  // namespace reidfit
