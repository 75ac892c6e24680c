#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reidfit/bootstrap.hpp"
#include "reidfit/errors.hpp"
#include "reidfit/estimation.hpp"
#include "reidfit/evaluation.hpp"
#include "reidfit/io.hpp"
#include "reidfit/rng.hpp"
#include "reidfit/simulation.hpp"
#include "reidfit/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace reidfit;

std::string prepare_output_dir(const std::string& flag_value,
                               const RunConfig* cfg) {
  const std::string dir = resolve_output_dir(flag_value, cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir);
  return dir;
}

std::vector<double> upstream_times(const Dataset& d) {
  std::vector<double> out;
  out.reserve(d.records.size());
  for (const ReidRecord& r : d.records) out.push_back(r.upstream_time);
  return out;
}

ArrivalDist arrival_for_config(const RunConfig& cfg) {
  if (cfg.model.arrival == ArrivalFamily::kUniform) {
    return UniformArrival{cfg.windows.upstream_start, cfg.windows.upstream_end};
  }
  if (!cfg.arrival_data) {
    throw DataError(
        "empirical arrival needs 'arrival_data' (a record file) in the config");
  }
  const ParseReport source = parse_records(*cfg.arrival_data, cfg.windows);
  const std::vector<double> times = upstream_times(source.dataset);
  return make_arrival(cfg, times);
}

int run_fit(const std::string& config_path, const std::string& input_path,
            const std::string& outdir_flag) {
  const RunConfig cfg = load_config(config_path);
  const std::string outdir = prepare_output_dir(outdir_flag, &cfg);

  const ParseReport report = parse_records(input_path, cfg.windows);
  if (!report.excluded_rows.empty()) {
    std::cerr << "note: excluded " << report.excluded_rows.size()
              << " rows outside the observable zone (first at line "
              << report.excluded_rows.front() << ")\n";
  }

  const std::vector<double> times = upstream_times(report.dataset);
  JourneyModel model{journey_family(cfg.model), make_arrival(cfg, times),
                     cfg.windows};

  FitResult fit = fit_mle(report.dataset, model);
  if (!fit.converged) {
    throw NumericalError("fit did not converge; rerun with different data");
  }
  if (fit.info_positive_definite) {
    fit.ci_fisher = fisher_ci(fit, cfg.alpha);
  }

  FitDocument doc;
  doc.alpha = cfg.alpha;
  doc.seed = cfg.seed;
  doc.n_records = report.dataset.records.size();
  doc.n_excluded = report.excluded_rows.size();
  doc.input_path = input_path;
  if (cfg.bootstrap_enabled && cfg.bootstrap_resamples > 0) {
    BootstrapSpec spec;
    spec.resamples = cfg.bootstrap_resamples;
    spec.alpha = cfg.alpha;
    spec.master_seed = cfg.seed;
    doc.bootstrap = bootstrap_ci(report.dataset, fit, spec);
  }
  doc.fit = std::move(fit);

  write_fit_json(outdir + "/fit.json", doc);
  write_marginals_csv(outdir + "/marginals.csv", doc.fit, report.dataset);
  write_downstream_csv(outdir + "/downstream_rate.csv", doc.fit, doc.n_records);
  write_zones_json(outdir + "/zones.json", doc.fit, doc.n_records);

  std::cout << "fitted " << model_name(cfg.model) << " on " << doc.n_records
            << " records: mean journey time "
            << doc.fit.mean_journey_time() << " h, survivor fraction "
            << doc.fit.survivor_fraction << "\n"
            << "outputs in " << outdir << "\n";
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& outdir_flag) {
  const RunConfig cfg = load_config(config_path);
  if (!cfg.simulation) {
    throw DataError("simulate needs a 'simulation' section in the config");
  }
  const std::string outdir = prepare_output_dir(outdir_flag, &cfg);

  SimConfig sim;
  sim.windows = cfg.windows;
  sim.journey = simulation_journey(cfg.model, *cfg.simulation);
  sim.arrival = arrival_for_config(cfg);
  sim.population = cfg.simulation->population;
  sim.seed = cfg.seed;

  const SimulatedSurvey survey = simulate_survey(sim);
  write_survey_csv(outdir + "/survey.csv", survey);
  write_records(outdir + "/survivors.csv", survey.survivors);

  std::cout << "simulated " << sim.population << " vehicles, "
            << survey.survivors.records.size() << " survivors (fraction "
            << survey.survivor_fraction << ")\n"
            << "outputs in " << outdir << "\n";
  return 0;
}

int run_evaluate(const std::string& fit_path, const std::string& input_path,
                 std::optional<double> alpha_flag,
                 const std::string& outdir_flag) {
  const FitDocument doc = load_fit_json(fit_path);
  if (!doc.fit.converged) {
    throw NumericalError("fit document records a non-converged fit");
  }
  const std::string outdir = prepare_output_dir(outdir_flag, nullptr);
  const ParseReport report = parse_records(input_path, doc.fit.model.windows);
  const double alpha = alpha_flag.value_or(doc.alpha);

  const KsReport ks = ks_test(report.dataset, doc.fit, alpha);
  write_ks_json(outdir + "/ks.json", ks);

  std::cout << "K-S on " << ks.n << " records: D_n = " << ks.d_n
            << ", critical value " << ks.critical_value << " at alpha "
            << ks.alpha << ", p = " << ks.p_value << " -> "
            << (ks.reject ? "reject" : "no rejection") << "\n"
            << "outputs in " << outdir << "\n";
  return 0;
}

int run_replicate(const std::string& fit_path, std::size_t n, int m,
                  std::optional<std::uint64_t> seed_flag,
                  const std::string& outdir_flag) {
  const FitDocument doc = load_fit_json(fit_path);
  if (!doc.fit.converged) {
    throw NumericalError("fit document records a non-converged fit");
  }
  const std::string outdir = prepare_output_dir(outdir_flag, nullptr);
  const std::uint64_t master = seed_flag.value_or(doc.seed);

  for (int j = 0; j < m; ++j) {
    const ReplicateResult rep =
        replicate_dataset(doc.fit, n, derive_seed(master, static_cast<std::uint64_t>(j)));
    const std::string path =
        outdir + "/replicate_" + std::to_string(j + 1) + ".csv";
    write_records(path, rep.data);
    std::cout << path << ": " << n << " records, acceptance rate "
              << rep.acceptance_rate << "\n";
  }
  return 0;
}

int run_coverage(const std::string& config_path, int replications,
                 const std::string& outdir_flag) {
  const RunConfig cfg = load_config(config_path);
  if (!cfg.simulation) {
    throw DataError("coverage needs a 'simulation' section in the config");
  }
  const std::string outdir = prepare_output_dir(outdir_flag, &cfg);

  SimConfig truth;
  truth.windows = cfg.windows;
  truth.journey = simulation_journey(cfg.model, *cfg.simulation);
  truth.arrival = arrival_for_config(cfg);
  truth.population = cfg.simulation->population;
  truth.seed = cfg.seed;

  const CoverageResult result =
      coverage_study(truth, journey_family(cfg.model), replications, cfg.alpha);
  write_coverage_json(outdir + "/coverage.json", result, truth);

  std::cout << "coverage over " << result.replications << " replications (alpha "
            << result.alpha << "): mean CI coverage " << result.coverage_mean
            << ", fit failures " << result.fit_failures << "\n"
            << "outputs in " << outdir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "reidfit: journey-time distribution fitting for two-point "
      "re-identification surveys with survivorship-bias correction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string input_path;
  std::string fit_path;
  std::string outdir_flag;
  double alpha_flag = -1.0;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  std::size_t replicate_n = 0;
  int replicate_m = 1;
  int coverage_r = 200;

  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "Fit a truncated journey-time model to a record file");
  fit_cmd->add_option("--config", config_path, "JSON run configuration")
      ->required();
  fit_cmd->add_option("--input", input_path, "record CSV file")->required();
  fit_cmd->add_option("--output-dir,-o", outdir_flag, "output directory");

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Generate a synthetic survey from the configured model");
  sim_cmd->add_option("--config", config_path, "JSON run configuration")
      ->required();
  sim_cmd->add_option("--output-dir,-o", outdir_flag, "output directory");

  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "Goodness-of-fit of a fitted model against a record file");
  eval_cmd->add_option("--fit", fit_path, "fit.json from a previous run")
      ->required();
  eval_cmd->add_option("--input", input_path, "record CSV file")->required();
  eval_cmd->add_option("--alpha", alpha_flag, "significance level override");
  eval_cmd->add_option("--output-dir,-o", outdir_flag, "output directory");

  CLI::App* rep_cmd = app.add_subcommand(
      "replicate", "Draw replicated datasets from a fitted model");
  rep_cmd->add_option("--fit", fit_path, "fit.json from a previous run")
      ->required();
  rep_cmd->add_option("-n,--records", replicate_n, "records per dataset")
      ->required();
  rep_cmd->add_option("-m,--datasets", replicate_m, "number of datasets");
  rep_cmd->add_option("--seed", seed_flag, "master seed (default: fit seed)")
      ->each([&](const std::string&) { seed_given = true; });
  rep_cmd->add_option("--output-dir,-o", outdir_flag, "output directory");

  CLI::App* cov_cmd = app.add_subcommand(
      "coverage", "Confidence-interval coverage study by simulation");
  cov_cmd->add_option("--config", config_path, "JSON run configuration")
      ->required();
  cov_cmd->add_option("-R,--replications", coverage_r, "number of replications");
  cov_cmd->add_option("--output-dir,-o", outdir_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(config_path, input_path, outdir_flag);
    if (sim_cmd->parsed()) return run_simulate(config_path, outdir_flag);
    if (eval_cmd->parsed()) {
      std::optional<double> alpha;
      if (alpha_flag > 0.0) alpha = alpha_flag;
      return run_evaluate(fit_path, input_path, alpha, outdir_flag);
    }
    if (rep_cmd->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_given) seed = seed_flag;
      return run_replicate(fit_path, replicate_n, replicate_m, seed, outdir_flag);
    }
    if (cov_cmd->parsed()) {
      return run_coverage(config_path, coverage_r, outdir_flag);
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
