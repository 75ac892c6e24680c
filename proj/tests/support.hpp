#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here must stay independent of the library's own quadrature/likelihood
// paths: closed forms, recursive adaptive Simpson, finite differences.

#include <cmath>
#include <functional>
#include <random>

#include "reidfit/dataset.hpp"
#include "reidfit/rng.hpp"
#include "reidfit/zone_geometry.hpp"

namespace testsupport {

// Monte Carlo study cases: upstream 6-9, downstream 7-10, journey box [0, 6].
inline reidfit::SurveyWindows case_windows() {
  return {6.0, 9.0, 7.0, 10.0, 0.0, 6.0};
}

// Closed-form observable-zone mass for the case windows with an exponential
// journey family (rate lam) and uniform arrivals.
//   x in [6,7]: slice [7-x, 10-x];  x in [7,9]: slice [0, 10-x]
inline double case1_normalization(double lam) {
  const double a1 = (1.0 - std::exp(-lam)) / lam;
  const double a2 = (std::exp(-3.0 * lam) - std::exp(-4.0 * lam)) / lam;
  const double b1 = 2.0;
  const double b2 = (std::exp(-lam) - std::exp(-3.0 * lam)) / lam;
  return (a1 - a2 + b1 - b2) / 3.0;
}

// Recursive adaptive Simpson, structurally unlike the library's
// panel-doubling composite rule.
inline double simpson_step(const std::function<double(double)>& f, double a,
                           double fa, double b, double fb, double m, double fm,
                           double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-10, int depth = 40) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, depth);
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_diff(const std::function<double(double)>& f, double x,
                          double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Random but always-valid survey windows (observable zone non-empty by
// construction: the downstream window starts inside the reachable band).
inline reidfit::SurveyWindows random_windows(std::mt19937_64& gen,
                                             bool with_free_flow) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  reidfit::SurveyWindows w;
  w.upstream_start = 5.0 + 4.0 * unif(gen);
  w.upstream_end = w.upstream_start + 1.0 + 4.0 * unif(gen);
  w.free_flow_time = with_free_flow ? 0.05 + 0.4 * unif(gen) : 0.0;
  w.max_journey = 4.0 + 6.0 * unif(gen);
  const double mid_reach = w.upstream_start + w.free_flow_time;
  w.downstream_start = mid_reach + unif(gen) * 1.5;
  w.downstream_end = w.downstream_start + 1.5 + 4.0 * unif(gen);
  return w;
}

// Uniformly random observable-zone record set: x uniform over the window,
// t uniform over the slice (not the model's law, just valid data).
inline std::vector<reidfit::ReidRecord> random_zone2_records(
    const reidfit::SurveyWindows& w, std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<reidfit::ReidRecord> out;
  while (out.size() < n) {
    const double x =
        w.upstream_start + unif(gen) * (w.upstream_end - w.upstream_start);
    const auto b = reidfit::bounds_at(w, x);
    if (!b) continue;
    const double t = b->lower + unif(gen) * (b->upper - b->lower);
    if (t <= 0.0) continue;
    out.push_back({x, t});
  }
  return out;
}

}  // namespace testsupport
