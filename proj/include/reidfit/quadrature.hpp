#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace reidfit {

struct QuadratureResult {
  double value = 0.0;
  int panels = 0;
  double est_abs_error = 0.0;
};

namespace detail {

// Composite Simpson on one smooth piece. The panel count doubles until two
// successive Simpson estimates agree to rel_tol; each trapezoid refinement
// reuses every previous evaluation. Returns the Richardson combination of
// the final pair with its error estimate.
template <class F>
QuadratureResult simpson_piece(F&& f, double a, double b, double rel_tol,
                               int max_panels, int min_refinements) {
  QuadratureResult out;
  if (!(b > a)) return out;

  double trap = 0.5 * (b - a) * (f(a) + f(b));  // T_1
  int panels = 1;
  double simpson_prev = 0.0;
  bool have_prev = false;
  int refinement = 0;

  for (;;) {
    const double h = (b - a) / panels;
    double mid_sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      mid_sum += f(a + (static_cast<double>(i) + 0.5) * h);
    }
    const double trap_next = 0.5 * trap + 0.5 * h * mid_sum;  // T_{2n}
    const double simpson = (4.0 * trap_next - trap) / 3.0;    // S_{2n}
    trap = trap_next;
    panels *= 2;
    ++refinement;

    if (have_prev) {
      const double diff = std::abs(simpson - simpson_prev);
      const bool converged = diff <= rel_tol * std::abs(simpson) || diff <= 1e-14;
      if ((refinement >= min_refinements && converged) || panels >= max_panels) {
        out.value = simpson + (simpson - simpson_prev) / 15.0;
        out.est_abs_error = diff / 15.0;
        out.panels = panels;
        return out;
      }
    }
    simpson_prev = simpson;
    have_prev = true;
  }
}

}  // namespace detail

// Integrates f over [a, b]. interior_breaks mark kinks of the integrand;
// each becomes a piece boundary so the per-piece convergence assumptions
// hold. Breaks outside (a, b) are ignored.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    std::span<const double> interior_breaks = {},
                                    double rel_tol = 1e-9,
                                    int max_panels_per_piece = 1 << 16,
                                    int min_refinements = 5) {
  QuadratureResult total;
  if (!(b > a)) return total;

  std::vector<double> cuts;
  cuts.reserve(interior_breaks.size() + 2);
  cuts.push_back(a);
  for (double c : interior_breaks) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo))) continue;
    const QuadratureResult piece = detail::simpson_piece(
        f, lo, hi, rel_tol, max_panels_per_piece, min_refinements);
    total.value += piece.value;
    total.panels += piece.panels;
    total.est_abs_error += piece.est_abs_error;
  }
  return total;
}

}  // namespace reidfit
