#include "reidfit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reidfit/errors.hpp"

namespace reidfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

void validate(const JourneyDist& d) {
  std::visit(Overload{
                 [](const Exponential& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
                     throw DataError("exponential rate must be finite and > 0");
                   }
                 },
                 [](const Weibull& w) {
                   if (!(w.shape > 0.0) || !(w.scale > 0.0) ||
                       !std::isfinite(w.shape) || !std::isfinite(w.scale)) {
                     throw DataError("weibull shape and scale must be finite and > 0");
                   }
                 },
             },
             d);
}

double pdf(const JourneyDist& d, double t) {
  return std::visit(
      Overload{
          [t](const Exponential& e) {
            return t < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * t);
          },
          [t](const Weibull& w) {
            if (t < 0.0) return 0.0;
            if (t == 0.0) {
              if (w.shape > 1.0) return 0.0;
              if (w.shape == 1.0) return 1.0 / w.scale;
              return kInf;
            }
            const double z = t / w.scale;
            return (w.shape / w.scale) * std::pow(z, w.shape - 1.0) *
                   std::exp(-std::pow(z, w.shape));
          },
      },
      d);
}

double log_pdf(const JourneyDist& d, double t) {
  return std::visit(
      Overload{
          [t](const Exponential& e) {
            return t < 0.0 ? -kInf : std::log(e.rate) - e.rate * t;
          },
          [t](const Weibull& w) {
            if (t < 0.0) return -kInf;
            if (t == 0.0) {
              if (w.shape > 1.0) return -kInf;
              if (w.shape == 1.0) return -std::log(w.scale);
              return kInf;
            }
            const double log_z = std::log(t) - std::log(w.scale);
            return std::log(w.shape) - std::log(w.scale) +
                   (w.shape - 1.0) * log_z - std::exp(w.shape * log_z);
          },
      },
      d);
}

double cdf(const JourneyDist& d, double t) {
  return std::visit(
      Overload{
          [t](const Exponential& e) {
            return t <= 0.0 ? 0.0 : -std::expm1(-e.rate * t);
          },
          [t](const Weibull& w) {
            return t <= 0.0 ? 0.0 : -std::expm1(-std::pow(t / w.scale, w.shape));
          },
      },
      d);
}

double survival(const JourneyDist& d, double t) {
  return std::visit(
      Overload{
          [t](const Exponential& e) {
            return t <= 0.0 ? 1.0 : std::exp(-e.rate * t);
          },
          [t](const Weibull& w) {
            return t <= 0.0 ? 1.0 : std::exp(-std::pow(t / w.scale, w.shape));
          },
      },
      d);
}

double mean(const JourneyDist& d) {
  return std::visit(
      Overload{
          [](const Exponential& e) { return 1.0 / e.rate; },
          [](const Weibull& w) { return w.scale * std::tgamma(1.0 + 1.0 / w.shape); },
      },
      d);
}

double quantile(const JourneyDist& d, double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw DataError("journey quantile: probability must lie in [0, 1)");
  }
  const double z = -std::log1p(-p);
  return std::visit(
      Overload{
          [z](const Exponential& e) { return z / e.rate; },
          [z](const Weibull& w) { return w.scale * std::pow(z, 1.0 / w.shape); },
      },
      d);
}

double sample(const JourneyDist& d, RngStream& rng) {
  return quantile(d, rng.uniform01());
}

std::vector<double> sample(const JourneyDist& d, RngStream& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(d, rng));
  return out;
}

std::size_t param_count(const JourneyDist& d) {
  return std::holds_alternative<Exponential>(d) ? 1u : 2u;
}

std::vector<double> params(const JourneyDist& d) {
  return std::visit(
      Overload{
          [](const Exponential& e) { return std::vector<double>{e.rate}; },
          [](const Weibull& w) { return std::vector<double>{w.shape, w.scale}; },
      },
      d);
}

std::vector<std::string> param_names(const JourneyDist& d) {
  return std::visit(
      Overload{
          [](const Exponential&) { return std::vector<std::string>{"rate"}; },
          [](const Weibull&) { return std::vector<std::string>{"shape", "scale"}; },
      },
      d);
}

JourneyDist with_params(const JourneyDist& d, std::span<const double> theta) {
  if (theta.size() != param_count(d)) {
    throw DataError("parameter vector length does not match the journey family");
  }
  if (std::holds_alternative<Exponential>(d)) return Exponential{theta[0]};
  return Weibull{theta[0], theta[1]};
}

const char* family_name(const JourneyDist& d) {
  return std::holds_alternative<Exponential>(d) ? "exponential" : "weibull";
}

double mean_from_params(const JourneyDist& family, std::span<const double> theta) {
  return mean(with_params(family, theta));
}

// --- arrival densities -------------------------------------------------------

void validate(const ArrivalDist& a) {
  std::visit(
      Overload{
          [](const UniformArrival& u) {
            if (!(u.start < u.end)) {
              throw DataError("uniform arrival window is empty");
            }
          },
          [](const EmpiricalArrival& e) {
            if (e.times.size() != e.densities.size() || e.times.size() < 2) {
              throw DataError("empirical arrival needs >= 2 matching knots");
            }
            double integral = 0.0;
            for (std::size_t i = 0; i + 1 < e.times.size(); ++i) {
              if (!(e.times[i + 1] > e.times[i])) {
                throw DataError("empirical arrival knots must be strictly ascending");
              }
              if (e.densities[i] < 0.0 || e.densities[i + 1] < 0.0) {
                throw DataError("empirical arrival density must be nonnegative");
              }
              integral += 0.5 * (e.densities[i] + e.densities[i + 1]) *
                          (e.times[i + 1] - e.times[i]);
            }
            if (std::abs(integral - 1.0) > 1e-9) {
              std::ostringstream oss;
              oss << "empirical arrival density integrates to " << integral
                  << ", expected 1 within 1e-9";
              throw DataError(oss.str());
            }
          },
      },
      a);
}

double arrival_pdf(const ArrivalDist& a, double x) {
  return std::visit(
      Overload{
          [x](const UniformArrival& u) {
            return (x < u.start || x > u.end) ? 0.0 : 1.0 / (u.end - u.start);
          },
          [x](const EmpiricalArrival& e) {
            if (x < e.times.front() || x > e.times.back()) return 0.0;
            const auto it = std::upper_bound(e.times.begin(), e.times.end(), x);
            const std::size_t hi = std::min<std::size_t>(
                std::distance(e.times.begin(), it), e.times.size() - 1);
            const std::size_t lo = hi - 1;
            const double frac = (x - e.times[lo]) / (e.times[hi] - e.times[lo]);
            const double v =
                e.densities[lo] + frac * (e.densities[hi] - e.densities[lo]);
            return std::max(0.0, v);
          },
      },
      a);
}

double arrival_mass(const ArrivalDist& a, double lo, double hi) {
  return std::visit(
      Overload{
          [lo, hi](const UniformArrival& u) {
            const double a2 = std::max(lo, u.start);
            const double b2 = std::min(hi, u.end);
            return b2 > a2 ? (b2 - a2) / (u.end - u.start) : 0.0;
          },
          [lo, hi](const EmpiricalArrival& e) {
            const double a2 = std::max(lo, e.times.front());
            const double b2 = std::min(hi, e.times.back());
            if (!(b2 > a2)) return 0.0;
            double mass = 0.0;
            for (std::size_t i = 0; i + 1 < e.times.size(); ++i) {
              const double s0 = std::max(a2, e.times[i]);
              const double s1 = std::min(b2, e.times[i + 1]);
              if (!(s1 > s0)) continue;
              const double width = e.times[i + 1] - e.times[i];
              const double d0 = e.densities[i];
              const double slope = (e.densities[i + 1] - d0) / width;
              auto value_at = [&](double x) {
                return d0 + slope * (x - e.times[i]);
              };
              mass += 0.5 * (value_at(s0) + value_at(s1)) * (s1 - s0);
            }
            return mass;
          },
      },
      a);
}

double arrival_support_start(const ArrivalDist& a) {
  return std::visit(Overload{[](const UniformArrival& u) { return u.start; },
                             [](const EmpiricalArrival& e) { return e.times.front(); }},
                    a);
}

double arrival_support_end(const ArrivalDist& a) {
  return std::visit(Overload{[](const UniformArrival& u) { return u.end; },
                             [](const EmpiricalArrival& e) { return e.times.back(); }},
                    a);
}

const char* arrival_name(const ArrivalDist& a) {
  return std::holds_alternative<UniformArrival>(a) ? "uniform" : "empirical";
}

ArrivalSampler::ArrivalSampler(const ArrivalDist& a) {
  validate(a);
  start_ = arrival_support_start(a);
  end_ = arrival_support_end(a);
  if (const auto* e = std::get_if<EmpiricalArrival>(&a)) {
    times_ = e->times;
    densities_ = e->densities;
    cumulative_.assign(times_.size(), 0.0);
    for (std::size_t i = 1; i < times_.size(); ++i) {
      cumulative_[i] = cumulative_[i - 1] +
                       0.5 * (densities_[i - 1] + densities_[i]) *
                           (times_[i] - times_[i - 1]);
    }
    const double total = cumulative_.back();
    for (double& c : cumulative_) c /= total;
  }
}

double ArrivalSampler::operator()(RngStream& rng) const {
  const double u = rng.uniform01();
  if (cumulative_.empty()) return start_ + u * (end_ - start_);

  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t hi = std::min<std::size_t>(
      std::distance(cumulative_.begin(), it), cumulative_.size() - 1);
  const std::size_t lo = hi - 1;
  const double width = times_[hi] - times_[lo];
  const double d0 = densities_[lo];
  const double slope_half = 0.5 * (densities_[hi] - d0) / width;
  const double target = u - cumulative_[lo];
  // Solve slope_half*xi^2 + d0*xi = target for xi in [0, width]; the stable
  // root avoids cancellation when the segment is nearly flat.
  double xi;
  const double disc = d0 * d0 + 4.0 * slope_half * target;
  const double root = std::sqrt(std::max(0.0, disc));
  if (d0 + root > 0.0) {
    xi = 2.0 * target / (d0 + root);
  } else if (slope_half > 0.0) {
    xi = std::sqrt(std::max(0.0, target / slope_half));
  } else {
    xi = 0.0;
  }
  return times_[lo] + std::clamp(xi, 0.0, width);
}

EmpiricalArrival build_empirical_arrival(std::span<const double> upstream_times,
                                         double window_start, double window_end,
                                         double bin_width) {
  if (!(window_start < window_end)) {
    throw DataError("empirical arrival: window is empty");
  }
  if (!(bin_width > 0.0)) {
    throw DataError("empirical arrival: bin width must be > 0");
  }
  const double span = window_end - window_start;
  const std::size_t bins =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(span / bin_width)));
  const double width = span / static_cast<double>(bins);

  std::vector<double> counts(bins, 0.0);
  std::size_t inside = 0;
  for (double x : upstream_times) {
    if (x < window_start || x > window_end) continue;
    std::size_t b = static_cast<std::size_t>((x - window_start) / width);
    if (b >= bins) b = bins - 1;
    counts[b] += 1.0;
    ++inside;
  }
  if (inside == 0) {
    throw DataError("empirical arrival: no arrivals inside the window");
  }

  // Knots: window edges plus every bin center; edge values extend the
  // nearest bin so the density covers the whole window.
  EmpiricalArrival out;
  out.times.reserve(bins + 2);
  out.densities.reserve(bins + 2);
  out.times.push_back(window_start);
  out.densities.push_back(0.0);  // placeholder, fixed below
  for (std::size_t b = 0; b < bins; ++b) {
    out.times.push_back(window_start + (static_cast<double>(b) + 0.5) * width);
    out.densities.push_back(
        std::max(0.0, counts[b] / (static_cast<double>(inside) * width)));
  }
  out.times.push_back(window_end);
  out.densities.push_back(out.densities.back());
  out.densities.front() = out.densities[1];

  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < out.times.size(); ++i) {
    integral += 0.5 * (out.densities[i] + out.densities[i + 1]) *
                (out.times[i + 1] - out.times[i]);
  }
  if (!(integral > 0.0)) {
    throw DataError("empirical arrival: degenerate histogram");
  }
  for (double& d : out.densities) d /= integral;
  return out;
}

}  // namespace reidfit
