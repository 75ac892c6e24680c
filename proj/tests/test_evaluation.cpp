#include "reidfit/evaluation.hpp"

#include <algorithm>
#include <cmath>

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

// FitResult carrying known-true parameters, for generator-side use.
FitResult synthetic_fit(const JourneyModel& m) {
  FitResult f;
  f.model = m;
  f.theta = params(m.journey);
  f.converged = true;
  return f;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("critical constants reproduce the standard table") {
  CHECK(ks_critical_constant(0.05) == doctest::Approx(1.358).epsilon(5e-4));
  CHECK(ks_critical_constant(0.01) == doctest::Approx(1.628).epsilon(5e-4));
  CHECK_THROWS_AS(ks_critical_constant(0.0), DataError);
}

TEST_CASE("kolmogorov series behaves like a survival function") {
  CHECK(kolmogorov_asymptotic_p(1e-9) == doctest::Approx(1.0));
  CHECK(kolmogorov_asymptotic_p(10.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  // Reference values from a 200-term evaluation of the same series.
  CHECK(kolmogorov_asymptotic_p(0.5) == doctest::Approx(0.963945243664875).epsilon(1e-9));
  CHECK(kolmogorov_asymptotic_p(0.8) == doctest::Approx(0.544142411574198).epsilon(1e-9));
  CHECK(kolmogorov_asymptotic_p(1.0) == doctest::Approx(0.269999671677355).epsilon(1e-9));
  CHECK(kolmogorov_asymptotic_p(1.8) == doctest::Approx(0.003067621347580).epsilon(1e-6));
  // At the alpha=0.05 critical constant the tail mass is alpha.
  CHECK(kolmogorov_asymptotic_p(1.3581015157) == doctest::Approx(0.05).epsilon(0.005));
  double prev = 1.0;
  for (double z = 0.3; z < 3.0; z += 0.1) {
    const double p = kolmogorov_asymptotic_p(z);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("single record at the model median gives D = one half") {
  const TruncatedModel model(case1_model(0.5));
  const double median = model.marginal_journey_quantile(0.5);
  Dataset d;
  d.windows = model.model().windows;
  const double x = 7.9;  // median journey is observable from this arrival hour
  REQUIRE(classify(d.windows, {x, median}) == Zone::kObservable);
  d.records.push_back({x, median});

  const KsReport r = ks_test(d, synthetic_fit(model.model()), 0.05);
  CHECK(r.n == 1);
  CHECK(r.d_n == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("statistic is invariant under record order") {
  const FitResult f = synthetic_fit(case1_model(0.5));
  const ReplicateResult rep = replicate_dataset(f, 400, 99);
  Dataset shuffled = rep.data;
  std::reverse(shuffled.records.begin(), shuffled.records.end());
  std::swap(shuffled.records[3], shuffled.records[77]);
  CHECK(ks_test(rep.data, f).d_n == ks_test(shuffled, f).d_n);
}

TEST_CASE("shifting journey times strictly raises the distance") {
  const FitResult f = synthetic_fit(case1_model(0.5));
  const ReplicateResult rep = replicate_dataset(f, 600, 123);
  const double base = ks_test(rep.data, f).d_n;

  Dataset shifted = rep.data;
  for (ReidRecord& r : shifted.records) r.journey_time += 0.5;
  shifted.records.erase(
      std::remove_if(shifted.records.begin(), shifted.records.end(),
                     [&](const ReidRecord& r) {
                       return classify(shifted.windows,
                                       {r.upstream_time, r.journey_time}) !=
                              Zone::kObservable;
                     }),
      shifted.records.end());
  REQUIRE(shifted.records.size() > 300);
  CHECK(ks_test(shifted, f).d_n > base);
}

TEST_CASE("replicates: zone membership, determinism, acceptance rate") {
  const FitResult f = synthetic_fit(case1_model(0.5));
  CHECK(replicate_dataset(f, 0, 1).data.records.empty());

  const ReplicateResult a = replicate_dataset(f, 2000, 7);
  const ReplicateResult b = replicate_dataset(f, 2000, 7);
  CHECK(a.data.records.size() == 2000);
  CHECK(zone_violations(a.data).empty());
  for (std::size_t i = 0; i < a.data.records.size(); ++i) {
    CHECK(a.data.records[i].upstream_time == b.data.records[i].upstream_time);
    CHECK(a.data.records[i].journey_time == b.data.records[i].journey_time);
  }

  // Acceptance rate is an independent estimate of the survivor fraction;
  // about 1e6 proposals at this request size.
  const ReplicateResult big = replicate_dataset(f, 614000, 20250809);
  const double c = testsupport::case1_normalization(0.5);
  const double sigma =
      std::sqrt(c * (1.0 - c) / static_cast<double>(big.proposals));
  CHECK(std::abs(big.acceptance_rate - c) < 3.0 * sigma);
}

TEST_CASE("replicate empirical cdf tracks the model marginal") {
  const FitResult f = synthetic_fit(case1_model(0.5));
  const ReplicateResult rep = replicate_dataset(f, 1000000, 31);
  const KsReport r = ks_test(rep.data, f);
  CHECK(r.d_n < 0.005);
}

TEST_CASE("runaway rejection raises a numerical error") {
  // Downstream window deep in the exponential tail: almost nothing survives.
  SurveyWindows w{6.0, 9.0, 14.0, 14.05, 0.0, 24.0};
  const JourneyModel m{Exponential{2.0}, UniformArrival{6.0, 9.0}, w};
  CHECK_THROWS_AS(replicate_dataset(synthetic_fit(m), 10, 1), NumericalError);
}

TEST_CASE("self-test rejection rate stays near the nominal level") {
  // Parametric self-consistency: generate from a fitted model, refit, test.
  const JourneyModel truth = case1_model(0.5);
  int rejects = 0;
  const int reps = 60;
  for (int i = 0; i < reps; ++i) {
    const ReplicateResult rep = replicate_dataset(
        synthetic_fit(truth), 800, derive_seed(6000, static_cast<std::uint64_t>(i)));
    const FitResult fit = fit_mle(rep.data, truth);
    REQUIRE(fit.converged);
    if (ks_test(rep.data, fit, 0.05).reject) ++rejects;
  }
  // Refitting makes the classical test conservative; generous band.
  CHECK(rejects <= 8);
}

TEST_CASE("ks preconditions") {
  const FitResult f = synthetic_fit(case1_model(0.5));
  Dataset empty;
  empty.windows = f.model.windows;
  CHECK_THROWS_AS(ks_test(empty, f), DataError);
  FitResult unconverged = f;
  unconverged.converged = false;
  const ReplicateResult rep = replicate_dataset(f, 50, 2);
  CHECK_THROWS_AS(ks_test(rep.data, unconverged), DataError);
  CHECK_THROWS_AS(replicate_dataset(unconverged, 10, 3), DataError);
}

}  // TEST_SUITE
