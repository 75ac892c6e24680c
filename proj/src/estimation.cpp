#include "reidfit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reidfit/errors.hpp"
#include "reidfit/quadrature.hpp"
#include "reidfit/stats.hpp"

namespace reidfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateMass = 1e-300;
constexpr double kParamFloor = 1e-6;  // exponential rate search range
constexpr double kParamCeil = 1e3;
constexpr double kLogBoxLo = -6.907755278982137;  // log 1e-3, Weibull box
constexpr double kLogBoxHi = 6.907755278982137;   // log 1e3

// Sufficient statistics and window geometry shared across likelihood
// evaluations of one fit.
struct LikelihoodContext {
  const SurveyWindows windows;
  const ArrivalDist arrival;
  const JourneyDist family;  // tag only; parameters replaced per evaluation
  std::size_t n = 0;
  double sum_t = 0.0;
  double sum_log_t = 0.0;
  std::vector<double> log_t;
  double sum_log_h = 0.0;
  std::vector<double> kinks;

  LikelihoodContext(const Dataset& d, const JourneyModel& m)
      : windows(m.windows), arrival(m.arrival), family(m.journey) {
    validate_geometry(arrival, windows);
    if (!zone_violations(d).empty()) {
      throw DataError(
          "dataset contains records outside the observable zone; ingestion "
          "must reject them first");
    }
    n = d.records.size();
    log_t.reserve(n);
    const bool weibull = std::holds_alternative<Weibull>(family);
    for (const ReidRecord& r : d.records) {
      sum_t += r.journey_time;
      if (weibull) {
        if (!(r.journey_time > 0.0)) {
          throw DataError("weibull fits require strictly positive journey times");
        }
        const double lt = std::log(r.journey_time);
        log_t.push_back(lt);
        sum_log_t += lt;
      }
      const double h = arrival_pdf(arrival, r.upstream_time);
      sum_log_h += std::log(h);
    }
    kinks = window_integration_kinks(windows, arrival);
  }

  double normalization(const JourneyDist& g) const {
    const auto f = [&](double x) {
      return arrival_pdf(arrival, x) * observable_slice_mass(g, windows, x);
    };
    return integrate_adaptive(f, windows.upstream_start, windows.upstream_end,
                              kinks)
        .value;
  }

  // Journey-family log-density terms summed over the data.
  double untruncated_terms(const JourneyDist& g) const {
    if (const auto* e = std::get_if<Exponential>(&g)) {
      return static_cast<double>(n) * std::log(e->rate) - e->rate * sum_t;
    }
    const auto& w = std::get<Weibull>(g);
    const double log_scale = std::log(w.scale);
    double pow_sum = 0.0;
    for (double lt : log_t) pow_sum += std::exp(w.shape * (lt - log_scale));
    return static_cast<double>(n) * (std::log(w.shape) - w.shape * log_scale) +
           (w.shape - 1.0) * sum_log_t - pow_sum;
  }

  // -inf for invalid or degenerate parameter points.
  double log_likelihood(std::span<const double> theta) const {
    if (n == 0) return 0.0;
    for (double v : theta) {
      if (!(v > 0.0) || !std::isfinite(v)) return -kInf;
    }
    const JourneyDist g = with_params(family, theta);
    const double c = normalization(g);
    if (!(c >= kDegenerateMass)) return -kInf;
    const double value = untruncated_terms(g) + sum_log_h -
                         static_cast<double>(n) * std::log(c);
    return std::isfinite(value) ? value : -kInf;
  }
};

// Truncation integrals of the exponential score and information (the u, v
// and b^2 terms), weighted by the arrival density.
struct ExpTruncationTerms {
  double u = 0.0;
  double v = 0.0;
  double q = 0.0;
};

ExpTruncationTerms exp_truncation_terms(const LikelihoodContext& ctx,
                                        double rate) {
  const SurveyWindows& w = ctx.windows;
  const auto bounds_or_zero = [&](double x, auto&& fn) {
    const double lo = std::max(w.free_flow_time, w.downstream_start - x);
    const double hi = std::min(w.max_journey, w.downstream_end - x);
    if (lo >= hi) return 0.0;
    return arrival_pdf(ctx.arrival, x) * fn(lo, hi);
  };
  ExpTruncationTerms out;
  out.v = integrate_adaptive(
              [&](double x) {
                return bounds_or_zero(x, [&](double lo, double hi) {
                  return std::exp(-rate * lo) - std::exp(-rate * hi);
                });
              },
              w.upstream_start, w.upstream_end, ctx.kinks)
              .value;
  out.u = integrate_adaptive(
              [&](double x) {
                return bounds_or_zero(x, [&](double lo, double hi) {
                  return lo * std::exp(-rate * lo) - hi * std::exp(-rate * hi);
                });
              },
              w.upstream_start, w.upstream_end, ctx.kinks)
              .value;
  out.q = integrate_adaptive(
              [&](double x) {
                return bounds_or_zero(x, [&](double lo, double hi) {
                  return lo * lo * std::exp(-rate * lo) -
                         hi * hi * std::exp(-rate * hi);
                });
              },
              w.upstream_start, w.upstream_end, ctx.kinks)
              .value;
  return out;
}

double exp_score(const LikelihoodContext& ctx, double rate,
                 const ExpTruncationTerms& terms) {
  const double n = static_cast<double>(ctx.n);
  return n / rate - ctx.sum_t + n * terms.u / terms.v;
}

double exp_info(const LikelihoodContext& ctx, double rate,
                const ExpTruncationTerms& terms) {
  const double n = static_cast<double>(ctx.n);
  return n / (rate * rate) +
         n * (terms.q * terms.v - terms.u * terms.u) / (terms.v * terms.v);
}

std::vector<double> fd_score(const LikelihoodContext& ctx,
                             std::span<const double> theta) {
  std::vector<double> grad(theta.size(), 0.0);
  std::vector<double> probe(theta.begin(), theta.end());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[j]));
    probe[j] = theta[j] + h;
    const double up = ctx.log_likelihood(probe);
    probe[j] = theta[j] - h;
    const double down = ctx.log_likelihood(probe);
    probe[j] = theta[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

InfoMatrix fd_information(const LikelihoodContext& ctx,
                          std::span<const double> theta) {
  const std::size_t dim = theta.size();
  InfoMatrix info;
  info.dim = dim;
  std::vector<double> h(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    h[j] = 1e-4 * std::max(1.0, std::abs(theta[j]));
  }
  const double base = ctx.log_likelihood(theta);
  std::vector<double> probe(theta.begin(), theta.end());

  for (std::size_t j = 0; j < dim; ++j) {
    probe[j] = theta[j] + h[j];
    const double up = ctx.log_likelihood(probe);
    probe[j] = theta[j] - h[j];
    const double down = ctx.log_likelihood(probe);
    probe[j] = theta[j];
    info.at(j, j) = -(up - 2.0 * base + down) / (h[j] * h[j]);
  }
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j + 1; k < dim; ++k) {
      double corner[4];
      int idx = 0;
      for (double sj : {1.0, -1.0}) {
        for (double sk : {1.0, -1.0}) {
          probe[j] = theta[j] + sj * h[j];
          probe[k] = theta[k] + sk * h[k];
          corner[idx++] = ctx.log_likelihood(probe);
          probe[j] = theta[j];
          probe[k] = theta[k];
        }
      }
      const double mixed =
          (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * h[j] * h[k]);
      info.at(j, k) = -mixed;
      info.at(k, j) = -mixed;
    }
  }
  // Symmetrize (no-op for the FD stencil, kept as the contract).
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j + 1; k < dim; ++k) {
      const double s = 0.5 * (info.at(j, k) + info.at(k, j));
      info.at(j, k) = s;
      info.at(k, j) = s;
    }
  }
  return info;
}

struct ExpSolveResult {
  double rate = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Safeguarded Newton on the score inside a sign-change bracket.
ExpSolveResult solve_exp_root(const LikelihoodContext& ctx, double lo,
                              double hi, double start) {
  ExpSolveResult out;
  double x = std::clamp(start, lo, hi);
  const double tol = 1e-8 * static_cast<double>(ctx.n);
  for (int iter = 1; iter <= 200; ++iter) {
    out.iterations = iter;
    const ExpTruncationTerms terms = exp_truncation_terms(ctx, x);
    const double s = exp_score(ctx, x, terms);
    if (std::abs(s) <= tol) {
      out.rate = x;
      out.converged = true;
      return out;
    }
    if (s > 0.0) {
      lo = x;  // likelihood still rising in rate
    } else {
      hi = x;
    }
    const double ds = -exp_info(ctx, x, terms);
    double next = (ds < 0.0) ? x - s / ds : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-14 * std::max(1.0, x)) {
      out.rate = 0.5 * (lo + hi);
      out.converged = true;
      return out;
    }
    x = next;
  }
  out.rate = x;
  out.converged = false;
  return out;
}

InfoMatrix scalar_info(double value) {
  InfoMatrix info;
  info.dim = 1;
  info.data[0] = value;
  return info;
}

// Shared tail of every fit path: likelihood, normalization, information,
// standard errors, default 95% intervals.
FitResult finish_fit(const LikelihoodContext& ctx, const JourneyModel& m,
                     std::vector<double> theta, InfoMatrix info, bool converged,
                     int iterations) {
  FitResult fit;
  fit.model = m;
  fit.model.journey = with_params(m.journey, theta);
  fit.theta = std::move(theta);
  fit.converged = converged;
  fit.iterations = iterations;
  fit.log_likelihood = ctx.log_likelihood(fit.theta);
  const double c = ctx.normalization(fit.model.journey);
  if (!(c >= kDegenerateMass)) {
    throw NumericalError("degenerate observable zone at the fitted parameters");
  }
  fit.survivor_fraction = c;
  fit.observed_info = info;
  fit.info_positive_definite = info.positive_definite();
  if (fit.info_positive_definite) {
    const InfoMatrix cov = info.inverse();
    fit.se.resize(info.dim);
    for (std::size_t j = 0; j < info.dim; ++j) {
      fit.se[j] = std::sqrt(cov.at(j, j));
    }
    // Constrained fits carry a reduced information matrix; per-parameter
    // intervals only make sense when dimensions line up.
    if (info.dim == fit.theta.size()) {
      fit.ci_fisher = fisher_ci(fit, 0.05);
    }
  }
  return fit;
}

FitResult fit_exponential(const JourneyModel& m, const LikelihoodContext& ctx,
                          std::optional<std::vector<double>> init) {
  if (ctx.n < 1) throw DataError("exponential fit requires at least 1 record");

  double start = ctx.sum_t > 0.0
                     ? static_cast<double>(ctx.n) / ctx.sum_t
                     : 1.0;
  if (init && init->size() == 1 && (*init)[0] > 0.0) start = (*init)[0];
  start = std::clamp(start, kParamFloor, kParamCeil);

  // Log-spaced score sweep: brackets every sign change, so multiple
  // stationary points are detected and the smallest-rate one wins.
  constexpr int kSweep = 97;
  std::vector<double> grid(kSweep), sweep_score(kSweep);
  std::vector<bool> valid(kSweep, false);
  for (int i = 0; i < kSweep; ++i) {
    const double lg = std::log(kParamFloor) +
                      (std::log(kParamCeil) - std::log(kParamFloor)) * i /
                          (kSweep - 1);
    grid[i] = std::exp(lg);
    const ExpTruncationTerms terms = exp_truncation_terms(ctx, grid[i]);
    if (terms.v >= kDegenerateMass) {
      valid[i] = true;
      sweep_score[i] = exp_score(ctx, grid[i], terms);
    }
  }
  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i + 1 < kSweep; ++i) {
    if (valid[i] && valid[i + 1] && sweep_score[i] > 0.0 &&
        sweep_score[i + 1] <= 0.0) {
      brackets.emplace_back(grid[i], grid[i + 1]);
    }
  }

  if (brackets.empty()) {
    // No stationary point in range; report the best grid point seen.
    double best_rate = start;
    double best_ll = -kInf;
    for (int i = 0; i < kSweep; ++i) {
      if (!valid[i]) continue;
      const double cand[1] = {grid[i]};
      const double ll = ctx.log_likelihood(cand);
      if (ll > best_ll) {
        best_ll = ll;
        best_rate = grid[i];
      }
    }
    return finish_fit(ctx, m, {best_rate},
                      scalar_info(exp_info(ctx, best_rate,
                                           exp_truncation_terms(ctx, best_rate))),
                      false, kSweep);
  }

  const auto& first = brackets.front();
  const ExpSolveResult solved =
      solve_exp_root(ctx, first.first, first.second, start);
  const bool unique_root = brackets.size() == 1;
  const double rate = solved.rate;
  return finish_fit(
      ctx, m, {rate},
      scalar_info(exp_info(ctx, rate, exp_truncation_terms(ctx, rate))),
      solved.converged && unique_root, solved.iterations);
}

struct SimplexPoint {
  std::array<double, 2> eta;
  double neg_ll;
};

double neg_ll_at(const LikelihoodContext& ctx, const std::array<double, 2>& eta) {
  for (double e : eta) {
    if (e < kLogBoxLo || e > kLogBoxHi) return kInf;
  }
  const double theta[2] = {std::exp(eta[0]), std::exp(eta[1])};
  const double ll = ctx.log_likelihood(theta);
  return std::isfinite(ll) ? -ll : kInf;
}

// Newton steps on finite-difference derivatives after the simplex search;
// keeps only likelihood-improving moves and stops once the score is at
// stationarity tolerance.
int newton_polish(const LikelihoodContext& ctx, std::vector<double>& theta,
                  int max_steps) {
  int steps = 0;
  const double tol = 1e-7 * std::max<double>(1.0, static_cast<double>(ctx.n));
  double ll = ctx.log_likelihood(theta);
  for (; steps < max_steps; ++steps) {
    const std::vector<double> g = fd_score(ctx, theta);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax <= tol) break;
    const InfoMatrix info = fd_information(ctx, theta);
    if (!info.positive_definite()) break;
    const InfoMatrix cov = info.inverse();
    std::vector<double> step(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (std::size_t j = 0; j < theta.size(); ++j) {
        step[i] += cov.at(i, j) * g[j];
      }
    }
    bool improved = false;
    double scale = 1.0;
    for (int back = 0; back < 12; ++back, scale *= 0.5) {
      std::vector<double> cand(theta);
      bool ok = true;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        cand[i] += scale * step[i];
        if (!(cand[i] > 0.0)) ok = false;
      }
      if (!ok) continue;
      const double cand_ll = ctx.log_likelihood(cand);
      if (cand_ll > ll) {
        theta = std::move(cand);
        ll = cand_ll;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return steps;
}

FitResult fit_weibull(const JourneyModel& m, const LikelihoodContext& ctx,
                      std::optional<std::vector<double>> init) {
  if (ctx.n < 3) throw DataError("weibull fit requires at least 3 records");

  std::array<double, 2> eta0;
  if (init && init->size() == 2 && (*init)[0] > 0.0 && (*init)[1] > 0.0) {
    eta0 = {std::log((*init)[0]), std::log((*init)[1])};
  } else {
    eta0 = {0.0, std::log(std::max(1e-6, ctx.sum_t / static_cast<double>(ctx.n)))};
  }
  {
    const double probe_theta[2] = {std::exp(eta0[0]), std::exp(eta0[1])};
    const JourneyDist g0 = with_params(ctx.family, probe_theta);
    if (!(ctx.normalization(g0) >= kDegenerateMass)) {
      throw NumericalError(
          "degenerate observable zone at the weibull starting point");
    }
  }

  // Nelder-Mead in log-parameter space: reflection 1, expansion 2,
  // contraction 0.5, shrink 0.5; done when the simplex LL spread < 1e-9.
  constexpr double kStep = 0.2;
  std::array<SimplexPoint, 3> simplex{
      SimplexPoint{eta0, neg_ll_at(ctx, eta0)},
      SimplexPoint{{eta0[0] + kStep, eta0[1]}, 0.0},
      SimplexPoint{{eta0[0], eta0[1] + kStep}, 0.0}};
  simplex[1].neg_ll = neg_ll_at(ctx, simplex[1].eta);
  simplex[2].neg_ll = neg_ll_at(ctx, simplex[2].eta);

  constexpr int kMaxIterations = 2000;
  int iterations = 0;
  bool converged = false;
  const auto by_value = [](const SimplexPoint& a, const SimplexPoint& b) {
    return a.neg_ll < b.neg_ll;
  };
  while (iterations < kMaxIterations) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (std::isfinite(simplex[2].neg_ll) &&
        simplex[2].neg_ll - simplex[0].neg_ll < 1e-9) {
      converged = true;
      break;
    }
    ++iterations;
    const std::array<double, 2> centroid{
        0.5 * (simplex[0].eta[0] + simplex[1].eta[0]),
        0.5 * (simplex[0].eta[1] + simplex[1].eta[1])};
    const auto at = [&](double coef) {
      return std::array<double, 2>{
          centroid[0] + coef * (centroid[0] - simplex[2].eta[0]),
          centroid[1] + coef * (centroid[1] - simplex[2].eta[1])};
    };
    const std::array<double, 2> reflected = at(1.0);
    const double f_reflected = neg_ll_at(ctx, reflected);
    if (f_reflected < simplex[0].neg_ll) {
      const std::array<double, 2> expanded = at(2.0);
      const double f_expanded = neg_ll_at(ctx, expanded);
      simplex[2] = f_expanded < f_reflected
                       ? SimplexPoint{expanded, f_expanded}
                       : SimplexPoint{reflected, f_reflected};
      continue;
    }
    if (f_reflected < simplex[1].neg_ll) {
      simplex[2] = {reflected, f_reflected};
      continue;
    }
    const bool outside = f_reflected < simplex[2].neg_ll;
    const std::array<double, 2> contracted = at(outside ? 0.5 : -0.5);
    const double f_contracted = neg_ll_at(ctx, contracted);
    if (f_contracted < std::min(f_reflected, simplex[2].neg_ll)) {
      simplex[2] = {contracted, f_contracted};
      continue;
    }
    for (int i = 1; i < 3; ++i) {  // shrink toward the best vertex
      for (int c = 0; c < 2; ++c) {
        simplex[i].eta[c] =
            simplex[0].eta[c] + 0.5 * (simplex[i].eta[c] - simplex[0].eta[c]);
      }
      simplex[i].neg_ll = neg_ll_at(ctx, simplex[i].eta);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);

  std::vector<double> theta{std::exp(simplex[0].eta[0]),
                            std::exp(simplex[0].eta[1])};
  iterations += newton_polish(ctx, theta, 20);
  InfoMatrix info = fd_information(ctx, theta);
  return finish_fit(ctx, m, std::move(theta), info, converged, iterations);
}

}  // namespace

bool InfoMatrix::positive_definite() const {
  if (dim == 1) return data[0] > 0.0 && std::isfinite(data[0]);
  if (dim == 2) {
    const double det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    return at(0, 0) > 0.0 && det > 0.0 && std::isfinite(det);
  }
  return false;
}

InfoMatrix InfoMatrix::inverse() const {
  InfoMatrix inv;
  inv.dim = dim;
  if (dim == 1) {
    if (data[0] == 0.0) throw NumericalError("singular information matrix");
    inv.data[0] = 1.0 / data[0];
    return inv;
  }
  const double det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  if (det == 0.0) throw NumericalError("singular information matrix");
  inv.at(0, 0) = at(1, 1) / det;
  inv.at(1, 1) = at(0, 0) / det;
  inv.at(0, 1) = -at(0, 1) / det;
  inv.at(1, 0) = -at(1, 0) / det;
  return inv;
}

double FitResult::mean_journey_time() const { return mean(model.journey); }

double total_log_likelihood(const Dataset& d, const JourneyModel& m) {
  if (d.records.empty()) return 0.0;
  validate(m.journey);
  const LikelihoodContext ctx(d, m);
  const double c = ctx.normalization(m.journey);
  if (!(c >= kDegenerateMass)) {
    throw NumericalError("degenerate observable zone: no mass at these parameters");
  }
  const double ll = ctx.untruncated_terms(m.journey) + ctx.sum_log_h -
                    static_cast<double>(ctx.n) * std::log(c);
  if (!std::isfinite(ll)) {
    throw NumericalError("log-likelihood is not finite for this dataset");
  }
  return ll;
}

std::vector<double> score(const Dataset& d, const JourneyModel& m) {
  validate(m.journey);
  const LikelihoodContext ctx(d, m);
  if (const auto* e = std::get_if<Exponential>(&m.journey)) {
    const ExpTruncationTerms terms = exp_truncation_terms(ctx, e->rate);
    if (!(terms.v >= kDegenerateMass)) {
      throw NumericalError("degenerate observable zone in score evaluation");
    }
    return {exp_score(ctx, e->rate, terms)};
  }
  return fd_score(ctx, params(m.journey));
}

InfoMatrix observed_information(const Dataset& d, const JourneyModel& m) {
  validate(m.journey);
  const LikelihoodContext ctx(d, m);
  if (const auto* e = std::get_if<Exponential>(&m.journey)) {
    const ExpTruncationTerms terms = exp_truncation_terms(ctx, e->rate);
    if (!(terms.v >= kDegenerateMass)) {
      throw NumericalError("degenerate observable zone in information evaluation");
    }
    return scalar_info(exp_info(ctx, e->rate, terms));
  }
  return fd_information(ctx, params(m.journey));
}

FitResult fit_mle(const Dataset& d, const JourneyModel& m,
                  std::optional<std::vector<double>> init) {
  const LikelihoodContext ctx(d, m);
  if (std::holds_alternative<Exponential>(m.journey)) {
    return fit_exponential(m, ctx, std::move(init));
  }
  return fit_weibull(m, ctx, std::move(init));
}

FisherIntervals fisher_ci(const FitResult& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("confidence level alpha must lie in (0, 1)");
  }
  if (!f.info_positive_definite || f.se.size() != f.theta.size()) {
    throw NumericalError(
        "observed information is not positive definite; Fisher intervals "
        "unavailable");
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  FisherIntervals out;
  out.alpha = alpha;
  out.params.reserve(f.theta.size());
  for (std::size_t j = 0; j < f.theta.size(); ++j) {
    out.params.push_back(
        {f.theta[j] - z * f.se[j], f.theta[j] + z * f.se[j]});
  }
  if (std::holds_alternative<Exponential>(f.model.journey)) {
    const ParamInterval rate_ci = out.params[0];
    ParamInterval mean_ci;
    mean_ci.lo = 1.0 / rate_ci.hi;
    mean_ci.hi = rate_ci.lo > 0.0 ? 1.0 / rate_ci.lo : kInf;
    out.mean_journey = mean_ci;
  }
  return out;
}

FitResult fit_mle_fixed_shape(const Dataset& d, const JourneyModel& m,
                              double shape) {
  if (!(shape > 0.0)) throw DataError("fixed shape must be > 0");
  if (!std::holds_alternative<Weibull>(m.journey)) {
    throw DataError("fixed-shape fit requires a weibull journey family");
  }
  const LikelihoodContext ctx(d, m);
  if (ctx.n < 1) throw DataError("fixed-shape fit requires at least 1 record");

  // Golden-section search on log scale, then a 1-D Newton polish on
  // finite-difference derivatives in the scale alone.
  const auto neg_ll = [&](double log_scale) {
    const double theta[2] = {shape, std::exp(log_scale)};
    const double ll = ctx.log_likelihood(theta);
    return std::isfinite(ll) ? -ll : kInf;
  };
  double lo = kLogBoxLo;
  double hi = kLogBoxHi;
  constexpr double kGolden = 0.6180339887498949;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = neg_ll(x1);
  double f2 = neg_ll(x2);
  int iterations = 0;
  while (hi - lo > 1e-12 && iterations < 200) {
    ++iterations;
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = neg_ll(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = neg_ll(x2);
    }
  }
  double scale = std::exp(0.5 * (lo + hi));

  const double tol = 1e-8 * std::max<double>(1.0, static_cast<double>(ctx.n));
  for (int step = 0; step < 50; ++step) {
    const double h = 1e-6 * std::max(1.0, scale);
    const double t_up[2] = {shape, scale + h};
    const double t_dn[2] = {shape, scale - h};
    const double t_0[2] = {shape, scale};
    const double ll_up = ctx.log_likelihood(t_up);
    const double ll_dn = ctx.log_likelihood(t_dn);
    const double ll_0 = ctx.log_likelihood(t_0);
    const double g = (ll_up - ll_dn) / (2.0 * h);
    if (std::abs(g) <= tol) break;
    const double h2 = 1e-4 * std::max(1.0, scale);
    const double s_up[2] = {shape, scale + h2};
    const double s_dn[2] = {shape, scale - h2};
    const double hess = (ctx.log_likelihood(s_up) - 2.0 * ll_0 +
                         ctx.log_likelihood(s_dn)) /
                        (h2 * h2);
    if (!(hess < 0.0)) break;
    double next = scale - g / hess;
    if (!(next > 0.0)) break;
    if (ctx.log_likelihood(std::array<double, 2>{shape, next}) <= ll_0) break;
    scale = next;
    ++iterations;
  }

  const double h2 = 1e-4 * std::max(1.0, scale);
  const double center[2] = {shape, scale};
  const double up2[2] = {shape, scale + h2};
  const double dn2[2] = {shape, scale - h2};
  const double scale_info = -(ctx.log_likelihood(up2) -
                              2.0 * ctx.log_likelihood(center) +
                              ctx.log_likelihood(dn2)) /
                            (h2 * h2);

  FitResult fit = finish_fit(ctx, m, {shape, scale}, scalar_info(scale_info),
                             true, iterations);
  return fit;
}

}  // namespace reidfit
