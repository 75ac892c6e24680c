#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reidfit/bootstrap.hpp"
#include "reidfit/dataset.hpp"
#include "reidfit/estimation.hpp"
#include "reidfit/evaluation.hpp"
#include "reidfit/simulation.hpp"

namespace reidfit {

enum class JourneyFamily { kExponential, kWeibull };
enum class ArrivalFamily { kUniform, kEmpirical };

struct ModelChoice {
  JourneyFamily journey = JourneyFamily::kExponential;
  ArrivalFamily arrival = ArrivalFamily::kUniform;
};

// Canonical names: exp-uniform, exp-empirical, weibull-uniform,
// weibull-empirical.
ModelChoice parse_model_name(const std::string& name);
std::string model_name(const ModelChoice& m);

struct SimulationSettings {
  std::size_t population = 0;
  std::optional<double> mean_journey;  // exponential, configured by mean
  std::optional<double> shape;         // weibull
  std::optional<double> scale;
};

struct RunConfig {
  SurveyWindows windows;
  ModelChoice model;
  double alpha = 0.05;
  bool bootstrap_enabled = true;
  int bootstrap_resamples = 1000;
  std::uint64_t seed = 0;
  std::string output_dir;  // empty means unset
  double arrival_bin_hours = 0.25;
  std::optional<SimulationSettings> simulation;
  std::optional<std::string> arrival_data;  // records feeding an empirical arrival
};

RunConfig load_config(const std::string& path);

// Journey family tag (parameters filled by fitting or simulation settings).
JourneyDist journey_family(const ModelChoice& m);

// Arrival density for the configured family; the empirical variant is built
// from the supplied upstream times.
ArrivalDist make_arrival(const RunConfig& cfg,
                         std::span<const double> upstream_times);

// Journey distribution for simulation, resolved from the settings.
JourneyDist simulation_journey(const ModelChoice& m,
                               const SimulationSettings& s);

// Precedence: explicit flag, config output_dir, REIDFIT_OUTPUT_DIR, ".".
std::string resolve_output_dir(const std::string& flag_value,
                               const RunConfig* cfg);

struct ParseReport {
  Dataset dataset;
  std::vector<std::size_t> excluded_rows;  // 1-based line numbers outside zone 2
  std::size_t total_rows = 0;
};

// Reads a record file: header `upstream_time,downstream_time`, values in
// decimal hours or HH:MM, `#` comments. Malformed rows raise DataError with
// the line number; rows outside the observable zone are excluded and counted.
ParseReport parse_records(const std::string& path, const SurveyWindows& w);

// Writes a dataset in the same record format (decimal hours).
void write_records(const std::string& path, const Dataset& d);

struct FitDocument {
  FitResult fit;
  std::optional<BootstrapResult> bootstrap;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t n_records = 0;
  std::size_t n_excluded = 0;
  std::string input_path;
};

void write_fit_json(const std::string& path, const FitDocument& doc);
// Restores the model, parameters and metadata needed by evaluate/replicate.
FitDocument load_fit_json(const std::string& path);

void write_survey_csv(const std::string& path, const SimulatedSurvey& survey);
void write_marginals_csv(const std::string& path, const FitResult& fit,
                         const Dataset& data);
void write_downstream_csv(const std::string& path, const FitResult& fit,
                          std::size_t n_records);
void write_zones_json(const std::string& path, const FitResult& fit,
                      std::size_t n_records);
void write_ks_json(const std::string& path, const KsReport& report);
void write_coverage_json(const std::string& path, const CoverageResult& result,
                         const SimConfig& truth);

}  // namespace reidfit
