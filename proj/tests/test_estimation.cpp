#include "reidfit/estimation.hpp"

#include <cmath>
#include <random>

#include <doctest.h>

#include "reidfit/errors.hpp"
#include "reidfit/simulation.hpp"
#include "support.hpp"

using namespace reidfit;

namespace {

JourneyModel case1_model(double rate = 0.5) {
  const SurveyWindows w = testsupport::case_windows();
  return {Exponential{rate}, UniformArrival{w.upstream_start, w.upstream_end}, w};
}

Dataset simulate_case1(std::size_t population, std::uint64_t seed) {
  SimConfig cfg;
  cfg.windows = testsupport::case_windows();
  cfg.journey = exponential_with_mean(2.0);
  cfg.arrival = UniformArrival{6.0, 9.0};
  cfg.population = population;
  cfg.seed = seed;
  return simulate_survey(cfg).survivors;
}

Dataset simulate_case2(std::size_t population, std::uint64_t seed) {
  SimConfig cfg;
  cfg.windows = testsupport::case_windows();
  cfg.journey = Weibull{0.75, 2.0};
  cfg.arrival = UniformArrival{6.0, 9.0};
  cfg.population = population;
  cfg.seed = seed;
  return simulate_survey(cfg).survivors;
}

// Wide-open windows: no effective truncation, textbook MLE limits apply.
JourneyModel untruncated_model(double rate) {
  SurveyWindows w;
  w.upstream_start = 6.0;
  w.upstream_end = 9.0;
  w.downstream_start = 6.0;
  w.downstream_end = 2000.0;
  w.free_flow_time = 0.0;
  w.max_journey = 1900.0;
  return {Exponential{rate}, UniformArrival{6.0, 9.0}, w};
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("log likelihood basics: empty data, additivity, log_pdf sum") {
  const JourneyModel m = case1_model(0.5);
  Dataset empty;
  empty.windows = m.windows;
  CHECK(total_log_likelihood(empty, m) == 0.0);

  std::mt19937_64 gen(11);
  Dataset d;
  d.windows = m.windows;
  d.records = testsupport::random_zone2_records(m.windows, gen, 50);
  const double base = total_log_likelihood(d, m);

  Dataset doubled = d;
  doubled.records.insert(doubled.records.end(), d.records.begin(),
                         d.records.end());
  CHECK(total_log_likelihood(doubled, m) == doctest::Approx(2.0 * base).epsilon(1e-12));

  const TruncatedModel tm(m);
  double by_sum = 0.0;
  for (const ReidRecord& r : d.records) {
    by_sum += tm.log_density({r.upstream_time, r.journey_time});
  }
  CHECK(base == doctest::Approx(by_sum).epsilon(1e-10));
}

TEST_CASE("log likelihood matches externally computed reference values") {
  // Five fixed records on the study-case windows; expected values computed
  // once with 30-digit quadrature of the same integrals. One record lands
  // exactly on the downstream closing edge, exercising the closed-boundary
  // convention inside the likelihood.
  Dataset d;
  d.windows = testsupport::case_windows();
  d.records = {{6.5, 1.0}, {7.2, 0.4}, {8.0, 2.0}, {8.8, 0.7}, {6.9, 3.0}};

  const JourneyModel exp_model{Exponential{0.8}, UniformArrival{6.0, 9.0},
                               d.windows};
  CHECK(normalization(exp_model).value ==
        doctest::Approx(0.72587678155996793).epsilon(1e-9));
  CHECK(total_log_likelihood(d, exp_model) ==
        doctest::Approx(-10.686904195256586).epsilon(1e-8));

  const JourneyModel wbl_model{Weibull{0.8, 1.5}, UniformArrival{6.0, 9.0},
                               d.windows};
  CHECK(normalization(wbl_model).value ==
        doctest::Approx(0.64797022786069346).epsilon(1e-9));
  CHECK(total_log_likelihood(d, wbl_model) ==
        doctest::Approx(-10.778574903744154).epsilon(1e-8));
}

TEST_CASE("log likelihood rejects data outside the observable zone") {
  const JourneyModel m = case1_model(0.5);
  Dataset d;
  d.windows = m.windows;
  d.records.push_back({6.5, 0.2});  // early missed
  CHECK_THROWS_AS(total_log_likelihood(d, m), DataError);
}

TEST_CASE("score reduces to the untruncated closed form") {
  std::mt19937_64 gen(21);
  const JourneyModel m = untruncated_model(0.7);
  Dataset d;
  d.windows = m.windows;
  std::exponential_distribution<double> texp(0.7);
  std::uniform_real_distribution<double> ux(6.0, 9.0);
  for (int i = 0; i < 200; ++i) d.records.push_back({ux(gen), 0.01 + texp(gen)});

  double sum_t = 0.0;
  for (const ReidRecord& r : d.records) sum_t += r.journey_time;
  const double expected = 200.0 / 0.7 - sum_t;
  CHECK(score(d, m)[0] == doctest::Approx(expected).epsilon(1e-10));

  // Untruncated information is n / rate^2 with no correction term.
  const InfoMatrix info = observed_information(d, m);
  CHECK(info.at(0, 0) == doctest::Approx(200.0 / (0.7 * 0.7)).epsilon(1e-10));
}

TEST_CASE("analytic exponential score matches finite differences") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const SurveyWindows w = testsupport::random_windows(gen, i % 2 == 1);
    Dataset d;
    d.windows = w;
    d.records = testsupport::random_zone2_records(w, gen, 5 + (i % 46));
    const double rate = 0.2 + 2.8 * unif(gen);
    const JourneyModel m{Exponential{rate}, UniformArrival{w.upstream_start, w.upstream_end}, w};

    const double analytic = score(d, m)[0];
    const double h = 1e-6 * std::max(1.0, rate);
    const auto ll = [&](double r) {
      return total_log_likelihood(
          d, JourneyModel{Exponential{r}, m.arrival, w});
    };
    const double fd = testsupport::central_diff(ll, rate, h);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("analytic exponential information matches finite differences") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const SurveyWindows w = testsupport::random_windows(gen, i % 2 == 0);
    Dataset d;
    d.windows = w;
    d.records = testsupport::random_zone2_records(w, gen, 10 + (i % 30));
    const double rate = 0.25 + 2.0 * unif(gen);
    const JourneyModel m{Exponential{rate}, UniformArrival{w.upstream_start, w.upstream_end}, w};

    const double analytic = observed_information(d, m).at(0, 0);
    const double h = 1e-4 * std::max(1.0, rate);
    const auto ll = [&](double r) {
      return total_log_likelihood(
          d, JourneyModel{Exponential{r}, m.arrival, w});
    };
    const double fd = -testsupport::second_diff(ll, rate, h);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("weibull finite-difference score agrees with an independent stencil") {
  std::mt19937_64 gen(24);
  Dataset d;
  const SurveyWindows w = testsupport::case_windows();
  d.windows = w;
  d.records = testsupport::random_zone2_records(w, gen, 60);
  const JourneyModel m{Weibull{0.9, 1.8}, UniformArrival{6.0, 9.0}, w};

  const auto s = score(d, m);
  REQUIRE(s.size() == 2);
  const auto ll_shape = [&](double k) {
    return total_log_likelihood(d, JourneyModel{Weibull{k, 1.8}, m.arrival, w});
  };
  const auto ll_scale = [&](double lam) {
    return total_log_likelihood(d, JourneyModel{Weibull{0.9, lam}, m.arrival, w});
  };
  CHECK(s[0] == doctest::Approx(testsupport::central_diff(ll_shape, 0.9, 2e-6)).epsilon(1e-4));
  CHECK(s[1] == doctest::Approx(testsupport::central_diff(ll_scale, 1.8, 2e-6)).epsilon(1e-4));
}

TEST_CASE("case 1 fit recovers the true mean within 5 percent") {
  const Dataset d = simulate_case1(20000, 42);
  CHECK(d.records.size() > 11000);

  const FitResult fit = fit_mle(d, case1_model(1.0));
  CHECK(fit.converged);
  CHECK(fit.info_positive_definite);
  const double mean_hat = fit.mean_journey_time();
  CHECK(mean_hat == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.survivor_fraction == doctest::Approx(testsupport::case1_normalization(1.0 / mean_hat)).epsilon(1e-8));

  // Stationarity at the optimum.
  const auto s = score(d, fit.model);
  CHECK(std::abs(s[0]) < 1e-6 * static_cast<double>(d.records.size()));

  // The likelihood at the estimate beats random perturbations and the truth.
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> unif(-0.2, 0.2);
  const double at_hat = fit.log_likelihood;
  for (int i = 0; i < 50; ++i) {
    const double rate = fit.theta[0] * std::exp(unif(gen));
    if (std::abs(rate - fit.theta[0]) < 1e-9) continue;
    const JourneyModel perturbed{Exponential{rate}, fit.model.arrival, d.windows};
    CHECK(total_log_likelihood(d, perturbed) < at_hat);
  }
  CHECK(at_hat >= total_log_likelihood(d, case1_model(0.5)));
}

TEST_CASE("case 2 weibull fit recovers shape and mean") {
  const Dataset d = simulate_case2(20000, 11);
  const JourneyModel m{Weibull{1.0, 1.0}, UniformArrival{6.0, 9.0},
                       testsupport::case_windows()};
  const FitResult fit = fit_mle(d, m);
  CHECK(fit.converged);
  CHECK(fit.theta[0] == doctest::Approx(0.75).epsilon(0.10));
  CHECK(fit.mean_journey_time() == doctest::Approx(2.0 * std::tgamma(1.0 + 1.0 / 0.75)).epsilon(0.07));

  const auto s = score(d, fit.model);
  CHECK(std::abs(s[0]) < 1e-6 * static_cast<double>(d.records.size()));
  CHECK(std::abs(s[1]) < 1e-6 * static_cast<double>(d.records.size()));

  // Likelihood-ratio sanity: the fit cannot be beaten by the truth.
  const JourneyModel truth{Weibull{0.75, 2.0}, m.arrival, m.windows};
  CHECK(fit.log_likelihood >= total_log_likelihood(d, truth));
}

TEST_CASE("untruncated limit recovers the closed-form MLE") {
  std::mt19937_64 gen(77);
  const JourneyModel m = untruncated_model(1.0);
  Dataset d;
  d.windows = m.windows;
  std::exponential_distribution<double> texp(0.55);
  std::uniform_real_distribution<double> ux(6.0, 9.0);
  double sum_t = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double t = 0.001 + texp(gen);
    d.records.push_back({ux(gen), t});
    sum_t += t;
  }
  const FitResult fit = fit_mle(d, m);
  CHECK(fit.converged);
  CHECK(fit.theta[0] ==
        doctest::Approx(static_cast<double>(d.records.size()) / sum_t).epsilon(1e-8));
}

TEST_CASE("weibull with frozen unit shape recovers the exponential fit") {
  const Dataset d = simulate_case1(6000, 314);
  const FitResult exp_fit = fit_mle(d, case1_model(1.0));
  const JourneyModel wm{Weibull{1.0, 1.0}, UniformArrival{6.0, 9.0}, d.windows};
  const FitResult frozen = fit_mle_fixed_shape(d, wm, 1.0);
  CHECK(frozen.converged);
  CHECK(frozen.theta[0] == 1.0);
  CHECK(frozen.theta[1] == doctest::Approx(1.0 / exp_fit.theta[0]).epsilon(1e-6));
}

TEST_CASE("truncation reduces per-observation information") {
  const Dataset d = simulate_case1(20000, 42);
  const FitResult fit = fit_mle(d, case1_model(1.0));
  const double per_obs =
      fit.observed_info.at(0, 0) / static_cast<double>(d.records.size());
  CHECK(per_obs < 1.0 / (fit.theta[0] * fit.theta[0]));
}

TEST_CASE("naive mean is biased low and the fit corrects it") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = simulate_case1(20000, seed);
    double naive = 0.0;
    for (const ReidRecord& r : d.records) naive += r.journey_time;
    naive /= static_cast<double>(d.records.size());
    const FitResult fit = fit_mle(d, case1_model(1.0));
    CHECK(naive < 2.0);
    CHECK(std::abs(fit.mean_journey_time() - 2.0) < std::abs(naive - 2.0));
  }
}

TEST_CASE("fisher intervals: quantile, transforms, shrink rate") {
  const Dataset d = simulate_case1(20000, 99);
  const FitResult fit = fit_mle(d, case1_model(1.0));
  REQUIRE(fit.ci_fisher.has_value());
  CHECK(fit.ci_fisher->alpha == 0.05);

  const FisherIntervals ci = fisher_ci(fit, 0.05);
  const double z = 1.9599639845;
  CHECK(ci.params[0].lo ==
        doctest::Approx(fit.theta[0] - z * fit.se[0]).epsilon(1e-6));
  CHECK(ci.params[0].hi ==
        doctest::Approx(fit.theta[0] + z * fit.se[0]).epsilon(1e-6));
  REQUIRE(ci.mean_journey.has_value());
  CHECK(ci.mean_journey->lo == doctest::Approx(1.0 / ci.params[0].hi));
  CHECK(ci.mean_journey->hi == doctest::Approx(1.0 / ci.params[0].lo));
  CHECK(ci.mean_journey->lo < fit.mean_journey_time());
  CHECK(fit.mean_journey_time() < ci.mean_journey->hi);

  // Quadrupling the population roughly halves the interval width.
  const Dataset d4 = simulate_case1(80000, 99);
  const FitResult fit4 = fit_mle(d4, case1_model(1.0));
  const FisherIntervals ci4 = fisher_ci(fit4, 0.05);
  const double width = ci.mean_journey->hi - ci.mean_journey->lo;
  const double width4 = ci4.mean_journey->hi - ci4.mean_journey->lo;
  CHECK(width / width4 == doctest::Approx(2.0).epsilon(0.15));

  // Wider alpha shrinks the interval.
  const FisherIntervals ci50 = fisher_ci(fit, 0.5);
  CHECK(ci50.params[0].hi - ci50.params[0].lo <
        ci.params[0].hi - ci.params[0].lo);
}

TEST_CASE("weibull fisher intervals omit the mean per reporting contract") {
  const Dataset d = simulate_case2(8000, 5);
  const JourneyModel m{Weibull{1.0, 1.0}, UniformArrival{6.0, 9.0}, d.windows};
  const FitResult fit = fit_mle(d, m);
  REQUIRE(fit.converged);
  REQUIRE(fit.ci_fisher.has_value());
  CHECK(fit.ci_fisher->params.size() == 2);
  CHECK_FALSE(fit.ci_fisher->mean_journey.has_value());
  CHECK(fit.ci_fisher->params[0].lo < 0.75);
  CHECK(0.75 < fit.ci_fisher->params[0].hi);
}

TEST_CASE("preconditions: record counts and alpha range") {
  Dataset d;
  d.windows = testsupport::case_windows();
  CHECK_THROWS_AS(fit_mle(d, case1_model(1.0)), DataError);

  d.records = {{7.5, 1.0}, {7.6, 1.1}};
  const JourneyModel wm{Weibull{1.0, 1.0}, UniformArrival{6.0, 9.0}, d.windows};
  CHECK_THROWS_AS(fit_mle(d, wm), DataError);

  const Dataset ok = simulate_case1(2000, 1);
  const FitResult fit = fit_mle(ok, case1_model(1.0));
  CHECK_THROWS_AS(fisher_ci(fit, 0.0), DataError);
  CHECK_THROWS_AS(fisher_ci(fit, 1.0), DataError);
}

TEST_CASE("info matrix algebra") {
  InfoMatrix m;
  m.dim = 2;
  m.at(0, 0) = 4.0;
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  m.at(1, 1) = 3.0;
  CHECK(m.positive_definite());
  const InfoMatrix inv = m.inverse();
  CHECK(inv.at(0, 0) == doctest::Approx(3.0 / 11.0));
  CHECK(inv.at(0, 1) == doctest::Approx(-1.0 / 11.0));
  CHECK(inv.at(1, 1) == doctest::Approx(4.0 / 11.0));

  InfoMatrix bad = m;
  bad.at(0, 0) = -4.0;
  CHECK_FALSE(bad.positive_definite());

  InfoMatrix indefinite = m;
  indefinite.at(0, 1) = indefinite.at(1, 0) = 10.0;
  CHECK_FALSE(indefinite.positive_definite());
}

}  // TEST_SUITE
