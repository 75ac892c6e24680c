#include "reidfit/truncated_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reidfit/errors.hpp"
#include "reidfit/quadrature.hpp"

namespace reidfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateMass = 1e-300;

double bound_lower(const SurveyWindows& w, double x) {
  return std::max(w.free_flow_time, w.downstream_start - x);
}

double bound_upper(const SurveyWindows& w, double x) {
  return std::min(w.max_journey, w.downstream_end - x);
}

}  // namespace

double observable_slice_mass(const JourneyDist& g, const SurveyWindows& w,
                             double x) {
  const double lo = bound_lower(w, x);
  const double hi = bound_upper(w, x);
  if (lo >= hi) return 0.0;
  return survival(g, lo) - survival(g, hi);
}

std::vector<double> window_integration_kinks(const SurveyWindows& w,
                                             const ArrivalDist& a) {
  std::vector<double> kinks;
  for (double c : {w.downstream_start - w.free_flow_time,
                   w.downstream_end - w.max_journey,
                   w.downstream_start - w.max_journey,
                   w.downstream_end - w.free_flow_time}) {
    if (c > w.upstream_start && c < w.upstream_end) kinks.push_back(c);
  }
  if (const auto* e = std::get_if<EmpiricalArrival>(&a)) {
    for (double t : e->times) {
      if (t > w.upstream_start && t < w.upstream_end) kinks.push_back(t);
    }
  }
  std::sort(kinks.begin(), kinks.end());
  return kinks;
}

void validate_geometry(const ArrivalDist& a, const SurveyWindows& w) {
  validate(w);
  validate(a);
  const double lo = arrival_support_start(a);
  const double hi = arrival_support_end(a);
  if (std::abs(lo - w.upstream_start) > 1e-9 ||
      std::abs(hi - w.upstream_end) > 1e-9) {
    std::ostringstream oss;
    oss << "arrival support [" << lo << ", " << hi
        << "] must equal the upstream window [" << w.upstream_start << ", "
        << w.upstream_end << "]";
    throw DataError(oss.str());
  }
}

void validate(const JourneyModel& m) {
  validate_geometry(m.arrival, m.windows);
  validate(m.journey);
}

TruncatedModel::TruncatedModel(JourneyModel m) : model_(std::move(m)) {
  validate(model_);
  const SurveyWindows& w = model_.windows;
  x_kinks_ = window_integration_kinks(w, model_.arrival);

  const auto integrand = [&](double x) {
    return arrival_pdf(model_.arrival, x) *
           observable_slice_mass(model_.journey, w, x);
  };
  const QuadratureResult q = integrate_adaptive(
      integrand, w.upstream_start, w.upstream_end, x_kinks_);
  if (!(q.value >= kDegenerateMass)) {
    throw NumericalError(
        "degenerate observable zone: the model places no mass on it");
  }
  norm_ = {q.value, q.panels, q.est_abs_error};
  log_norm_ = std::log(q.value);

  // Journey-time support of the truncated marginal. The slice-width function
  // is concave piecewise linear in x, so the region with a nonempty slice is
  // an interval; bound candidates sit at its ends and at interior kinks.
  std::vector<double> edges{w.upstream_start, w.upstream_end};
  edges.insert(edges.end(), x_kinks_.begin(), x_kinks_.end());
  std::sort(edges.begin(), edges.end());
  auto width_at = [&](double x) { return bound_upper(w, x) - bound_lower(w, x); };
  std::vector<double> candidates;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (width_at(edges[i]) > 0.0) candidates.push_back(edges[i]);
    if (i + 1 < edges.size()) {
      const double w0 = width_at(edges[i]);
      const double w1 = width_at(edges[i + 1]);
      if ((w0 > 0.0) != (w1 > 0.0) && w1 != w0) {
        candidates.push_back(edges[i] +
                             (edges[i + 1] - edges[i]) * (0.0 - w0) / (w1 - w0));
      }
    }
  }
  support_min_ = kInf;
  support_max_ = -kInf;
  for (double x : candidates) {
    support_min_ = std::min(support_min_, bound_lower(w, x));
    support_max_ = std::max(support_max_, bound_upper(w, x));
  }
}

double TruncatedModel::log_density(TimeTimePoint p) const {
  if (classify(model_.windows, p) != Zone::kObservable) return -kInf;
  const double h = arrival_pdf(model_.arrival, p.upstream_time);
  if (!(h > 0.0)) return -kInf;
  return std::log(h) + log_pdf(model_.journey, p.journey_time) - log_norm_;
}

double TruncatedModel::marginal_journey_cdf(double t) const {
  if (t <= support_min_) return 0.0;
  if (t >= support_max_) return 1.0;
  const SurveyWindows& w = model_.windows;
  std::vector<double> breaks(x_kinks_);
  breaks.push_back(w.downstream_start - t);  // where t crosses the lower bound
  breaks.push_back(w.downstream_end - t);    // where t crosses the upper bound
  const auto integrand = [&](double x) {
    const double lo = bound_lower(w, x);
    const double hi = bound_upper(w, x);
    if (lo >= hi || t <= lo) return 0.0;
    return arrival_pdf(model_.arrival, x) *
           (survival(model_.journey, lo) -
            survival(model_.journey, std::min(t, hi)));
  };
  const QuadratureResult q = integrate_adaptive(
      integrand, w.upstream_start, w.upstream_end, breaks);
  return std::clamp(q.value / norm_.value, 0.0, 1.0);
}

double TruncatedModel::marginal_journey_pdf(double t) const {
  const SurveyWindows& w = model_.windows;
  if (t < w.free_flow_time || t > w.max_journey) return 0.0;
  const double x_lo = std::max(w.upstream_start, w.downstream_start - t);
  const double x_hi = std::min(w.upstream_end, w.downstream_end - t);
  if (x_lo >= x_hi) return 0.0;
  return pdf(model_.journey, t) * arrival_mass(model_.arrival, x_lo, x_hi) /
         norm_.value;
}

double TruncatedModel::marginal_journey_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DataError("marginal quantile: probability outside [0, 1]");
  }
  double lo = support_min_;
  double hi = support_max_;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (marginal_journey_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double TruncatedModel::downstream_arrival_density(double y) const {
  const SurveyWindows& w = model_.windows;
  if (y < w.downstream_start || y > w.downstream_end) return 0.0;
  const double t_lo = std::max(w.free_flow_time, y - w.upstream_end);
  const double t_hi = std::min(w.max_journey, y - w.upstream_start);
  if (t_lo >= t_hi) return 0.0;

  const auto* e = std::get_if<EmpiricalArrival>(&model_.arrival);

  // Weibull with shape < 1 has an integrable pdf singularity at t = 0;
  // substituting s = (t/scale)^shape turns g(t) dt into e^{-s} ds and the
  // integrand becomes smooth there.
  if (const auto* wb = std::get_if<Weibull>(&model_.journey);
      wb != nullptr && wb->shape < 1.0) {
    const double k = wb->shape;
    const double scale = wb->scale;
    const auto to_s = [&](double t) { return std::pow(t / scale, k); };
    const auto to_t = [&](double s) { return scale * std::pow(s, 1.0 / k); };
    std::vector<double> breaks;
    if (e != nullptr) {
      for (double xk : e->times) {
        const double t = y - xk;
        if (t > t_lo && t < t_hi) breaks.push_back(to_s(t));
      }
    }
    const auto integrand = [&](double s) {
      return arrival_pdf(model_.arrival, y - to_t(s)) * std::exp(-s);
    };
    const QuadratureResult q =
        integrate_adaptive(integrand, to_s(t_lo), to_s(t_hi), breaks);
    return std::max(0.0, q.value / norm_.value);
  }

  std::vector<double> breaks;
  if (e != nullptr) {
    for (double xk : e->times) breaks.push_back(y - xk);
  }
  const auto integrand = [&](double t) {
    return arrival_pdf(model_.arrival, y - t) * pdf(model_.journey, t);
  };
  const QuadratureResult q = integrate_adaptive(integrand, t_lo, t_hi, breaks);
  return std::max(0.0, q.value / norm_.value);
}

ZoneMasses TruncatedModel::unobserved_mass() const {
  const SurveyWindows& w = model_.windows;
  const JourneyDist& g = model_.journey;
  const double s_floor = survival(g, w.free_flow_time);
  const double s_cap = survival(g, w.max_journey);

  const auto early = [&](double x) {
    const double cut =
        std::clamp(w.downstream_start - x, w.free_flow_time, w.max_journey);
    return arrival_pdf(model_.arrival, x) * (s_floor - survival(g, cut));
  };
  const auto late = [&](double x) {
    const double cut =
        std::clamp(w.downstream_end - x, w.free_flow_time, w.max_journey);
    return arrival_pdf(model_.arrival, x) * (survival(g, cut) - s_cap);
  };
  const auto observable = [&](double x) {
    return arrival_pdf(model_.arrival, x) * observable_slice_mass(g, w, x);
  };

  ZoneMasses zm;
  zm.early_missed =
      integrate_adaptive(early, w.upstream_start, w.upstream_end, x_kinks_).value;
  zm.late_missed =
      integrate_adaptive(late, w.upstream_start, w.upstream_end, x_kinks_).value;
  zm.observable =
      integrate_adaptive(observable, w.upstream_start, w.upstream_end, x_kinks_)
          .value;
  const double box = zm.early_missed + zm.observable + zm.late_missed;
  if (!(box >= kDegenerateMass)) {
    throw NumericalError("interest box carries no mass under this model");
  }
  zm.early_missed /= box;
  zm.observable /= box;
  zm.late_missed /= box;
  return zm;
}

NormalizationResult normalization(const JourneyModel& m) {
  return TruncatedModel(m).normalization();
}

double log_pdf(const JourneyModel& m, TimeTimePoint p) {
  return TruncatedModel(m).log_density(p);
}

double marginal_journey_cdf(const JourneyModel& m, double t) {
  return TruncatedModel(m).marginal_journey_cdf(t);
}

double downstream_arrival_density(const JourneyModel& m, double y) {
  return TruncatedModel(m).downstream_arrival_density(y);
}

ZoneMasses unobserved_mass(const JourneyModel& m) {
  return TruncatedModel(m).unobserved_mass();
}

}  // namespace reidfit
