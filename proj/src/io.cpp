#include "reidfit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reidfit/errors.hpp"
#include "reidfit/version.hpp"

namespace reidfit {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void row_error(std::size_t line, const std::string& content,
                            const std::string& reason) {
  std::ostringstream oss;
  oss << "malformed row " << line << " (" << reason << "): " << content;
  throw DataError(oss.str());
}

// Decimal hours (e.g. 6.6) or clock time (e.g. 06:36).
double parse_time_token(const std::string& raw, std::size_t line,
                        const std::string& content) {
  const std::string token = trim(raw);
  if (token.empty()) row_error(line, content, "empty time field");

  const auto colon = token.find(':');
  if (colon != std::string::npos) {
    int hours = 0;
    int minutes = 0;
    const auto hr = std::from_chars(token.data(), token.data() + colon, hours);
    const auto mr = std::from_chars(token.data() + colon + 1,
                                    token.data() + token.size(), minutes);
    if (hr.ec != std::errc{} || hr.ptr != token.data() + colon ||
        mr.ec != std::errc{} || mr.ptr != token.data() + token.size() ||
        hours < 0 || minutes < 0 || minutes > 59) {
      row_error(line, content, "expected HH:MM");
    }
    return hours + minutes / 60.0;
  }

  double value = 0.0;
  const auto r =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (r.ec != std::errc{} || r.ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    row_error(line, content, "expected decimal hours or HH:MM");
  }
  return value;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json windows_to_json(const SurveyWindows& w) {
  return json{{"upstream_start", w.upstream_start},
              {"upstream_end", w.upstream_end},
              {"downstream_start", w.downstream_start},
              {"downstream_end", w.downstream_end},
              {"free_flow_time", w.free_flow_time},
              {"max_journey", w.max_journey}};
}

SurveyWindows windows_from_json(const json& j) {
  SurveyWindows w;
  w.upstream_start = j.at("upstream_start").get<double>();
  w.upstream_end = j.at("upstream_end").get<double>();
  w.downstream_start = j.at("downstream_start").get<double>();
  w.downstream_end = j.at("downstream_end").get<double>();
  w.free_flow_time = j.value("free_flow_time", 0.0);
  w.max_journey = j.value("max_journey", 24.0);
  validate(w);
  return w;
}

json arrival_to_json(const ArrivalDist& a) {
  if (const auto* e = std::get_if<EmpiricalArrival>(&a)) {
    return json{{"type", "empirical"},
                {"times", e->times},
                {"densities", e->densities}};
  }
  return json{{"type", "uniform"}};
}

ArrivalDist arrival_from_json(const json& j, const SurveyWindows& w) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") {
    return UniformArrival{w.upstream_start, w.upstream_end};
  }
  if (type == "empirical") {
    EmpiricalArrival e;
    e.times = j.at("times").get<std::vector<double>>();
    e.densities = j.at("densities").get<std::vector<double>>();
    validate(ArrivalDist{e});
    return e;
  }
  throw DataError("unknown arrival type in fit document: " + type);
}

json theta_to_json(const FitResult& f) {
  json out;
  const auto names = param_names(f.model.journey);
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = f.theta[i];
  return out;
}

json interval_to_json(const ParamInterval& iv) {
  json out = json::array();
  out.push_back(iv.lo);
  out.push_back(std::isfinite(iv.hi) ? json(iv.hi) : json(nullptr));
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace

ModelChoice parse_model_name(const std::string& name) {
  if (name == "exp-uniform")
    return {JourneyFamily::kExponential, ArrivalFamily::kUniform};
  if (name == "exp-empirical")
    return {JourneyFamily::kExponential, ArrivalFamily::kEmpirical};
  if (name == "weibull-uniform")
    return {JourneyFamily::kWeibull, ArrivalFamily::kUniform};
  if (name == "weibull-empirical")
    return {JourneyFamily::kWeibull, ArrivalFamily::kEmpirical};
  throw DataError(
      "unknown model '" + name +
      "'; expected exp-uniform, exp-empirical, weibull-uniform or "
      "weibull-empirical");
}

std::string model_name(const ModelChoice& m) {
  std::string out =
      m.journey == JourneyFamily::kExponential ? "exp" : "weibull";
  out += m.arrival == ArrivalFamily::kUniform ? "-uniform" : "-empirical";
  return out;
}

RunConfig load_config(const std::string& path) {
  const json j = load_json_file(path);
  RunConfig cfg;
  try {
    cfg.windows = windows_from_json(j.at("windows"));
    cfg.model = parse_model_name(j.at("model").get<std::string>());
    cfg.alpha = j.value("alpha", 0.05);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.output_dir = j.value("output_dir", std::string{});
    cfg.arrival_bin_hours = j.value("arrival_bin_hours", 0.25);
    if (j.contains("bootstrap")) {
      const json& b = j.at("bootstrap");
      cfg.bootstrap_enabled = b.value("enabled", true);
      cfg.bootstrap_resamples = b.value("resamples", 1000);
    }
    if (j.contains("simulation")) {
      const json& s = j.at("simulation");
      SimulationSettings sim;
      sim.population = s.at("population").get<std::size_t>();
      if (s.contains("mean_journey")) sim.mean_journey = s.at("mean_journey").get<double>();
      if (s.contains("shape")) sim.shape = s.at("shape").get<double>();
      if (s.contains("scale")) sim.scale = s.at("scale").get<double>();
      cfg.simulation = sim;
    }
    if (j.contains("arrival_data")) {
      cfg.arrival_data = j.at("arrival_data").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw DataError("invalid config " + path + ": " + e.what());
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw DataError("config alpha must lie in (0, 1)");
  }
  if (!(cfg.arrival_bin_hours > 0.0)) {
    throw DataError("config arrival_bin_hours must be > 0");
  }
  return cfg;
}

JourneyDist journey_family(const ModelChoice& m) {
  if (m.journey == JourneyFamily::kExponential) return Exponential{1.0};
  return Weibull{1.0, 1.0};
}

ArrivalDist make_arrival(const RunConfig& cfg,
                         std::span<const double> upstream_times) {
  if (cfg.model.arrival == ArrivalFamily::kUniform) {
    return UniformArrival{cfg.windows.upstream_start, cfg.windows.upstream_end};
  }
  return build_empirical_arrival(upstream_times, cfg.windows.upstream_start,
                                 cfg.windows.upstream_end,
                                 cfg.arrival_bin_hours);
}

JourneyDist simulation_journey(const ModelChoice& m,
                               const SimulationSettings& s) {
  if (m.journey == JourneyFamily::kExponential) {
    if (!s.mean_journey) {
      throw DataError("simulation with an exponential model needs mean_journey");
    }
    return exponential_with_mean(*s.mean_journey);
  }
  if (!s.shape || !s.scale) {
    throw DataError("simulation with a weibull model needs shape and scale");
  }
  const JourneyDist d = Weibull{*s.shape, *s.scale};
  validate(d);
  return d;
}

std::string resolve_output_dir(const std::string& flag_value,
                               const RunConfig* cfg) {
  if (!flag_value.empty()) return flag_value;
  if (cfg != nullptr && !cfg->output_dir.empty()) return cfg->output_dir;
  if (const char* env = std::getenv("REIDFIT_OUTPUT_DIR");
      env != nullptr && env[0] != '\0') {
    return env;
  }
  return ".";
}

ParseReport parse_records(const std::string& path, const SurveyWindows& w) {
  validate(w);
  std::ifstream in(path);
  if (!in) throw DataError("cannot open record file: " + path);

  ParseReport report;
  report.dataset.windows = w;

  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;

    if (!header_seen) {
      std::string squeezed;
      for (char c : content) {
        if (!std::isspace(static_cast<unsigned char>(c))) squeezed += c;
      }
      if (squeezed != "upstream_time,downstream_time") {
        row_error(line_number, content,
                  "expected header 'upstream_time,downstream_time'");
      }
      header_seen = true;
      continue;
    }

    ++report.total_rows;
    const auto comma = content.find(',');
    if (comma == std::string::npos ||
        content.find(',', comma + 1) != std::string::npos) {
      row_error(line_number, content, "expected exactly two fields");
    }
    const double up = parse_time_token(content.substr(0, comma), line_number, content);
    const double down = parse_time_token(content.substr(comma + 1), line_number, content);
    if (!(down > up)) {
      row_error(line_number, content,
                "downstream time must be strictly after upstream time");
    }
    const double journey = down - up;
    if (classify(w, {up, journey}) != Zone::kObservable) {
      report.excluded_rows.push_back(line_number);
      continue;
    }
    report.dataset.records.push_back({up, journey});
  }
  if (!header_seen) {
    throw DataError("record file " + path + " is empty or has no header");
  }
  if (report.dataset.records.empty()) {
    throw DataError("record file " + path +
                    " has no usable rows inside the observable zone");
  }
  return report;
}

void write_records(const std::string& path, const Dataset& d) {
  std::ofstream out = open_out(path);
  out << "upstream_time,downstream_time\n";
  for (const ReidRecord& r : d.records) {
    out << fmt(r.upstream_time) << ','
        << fmt(r.upstream_time + r.journey_time) << '\n';
  }
}

void write_fit_json(const std::string& path, const FitDocument& doc) {
  const FitResult& f = doc.fit;
  const ModelChoice choice{
      std::holds_alternative<Exponential>(f.model.journey)
          ? JourneyFamily::kExponential
          : JourneyFamily::kWeibull,
      std::holds_alternative<UniformArrival>(f.model.arrival)
          ? ArrivalFamily::kUniform
          : ArrivalFamily::kEmpirical};

  json j;
  j["reidfit_version"] = kVersion;
  j["kind"] = "fit";
  j["model"] = model_name(choice);
  j["alpha"] = doc.alpha;
  j["seed"] = doc.seed;
  j["input"] = doc.input_path;
  j["n_records"] = doc.n_records;
  j["n_excluded"] = doc.n_excluded;
  j["windows"] = windows_to_json(f.model.windows);
  j["arrival"] = arrival_to_json(f.model.arrival);
  j["theta"] = theta_to_json(f);
  j["mean_journey_time"] = f.mean_journey_time();
  j["log_likelihood"] = f.log_likelihood;
  j["survivor_fraction"] = f.survivor_fraction;
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;

  json info = json::array();
  for (std::size_t r = 0; r < f.observed_info.dim; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < f.observed_info.dim; ++c) {
      row.push_back(f.observed_info.at(r, c));
    }
    info.push_back(row);
  }
  j["observed_information"] = info;
  j["standard_errors"] = f.se;

  if (f.ci_fisher) {
    json ci;
    ci["alpha"] = f.ci_fisher->alpha;
    const auto names = param_names(f.model.journey);
    json p;
    for (std::size_t i = 0; i < names.size(); ++i) {
      p[names[i]] = interval_to_json(f.ci_fisher->params[i]);
    }
    ci["params"] = p;
    ci["mean_journey_time"] = f.ci_fisher->mean_journey
                                  ? interval_to_json(*f.ci_fisher->mean_journey)
                                  : json(nullptr);
    j["ci_fisher"] = ci;
  } else {
    j["ci_fisher"] = nullptr;
  }

  if (doc.bootstrap) {
    const BootstrapResult& b = *doc.bootstrap;
    json ci;
    ci["alpha"] = b.alpha;
    ci["resamples"] = b.resamples;
    ci["refit_failures"] = b.refit_failures;
    json intervals;
    for (std::size_t i = 0; i < b.statistic_names.size(); ++i) {
      intervals[b.statistic_names[i]] = interval_to_json(b.intervals[i]);
    }
    ci["intervals"] = intervals;
    j["ci_bootstrap"] = ci;
  } else {
    j["ci_bootstrap"] = nullptr;
  }

  open_out(path) << j.dump(2) << '\n';
}

FitDocument load_fit_json(const std::string& path) {
  const json j = load_json_file(path);
  FitDocument doc;
  try {
    const ModelChoice choice = parse_model_name(j.at("model").get<std::string>());
    const SurveyWindows w = windows_from_json(j.at("windows"));
    const ArrivalDist arrival = arrival_from_json(j.at("arrival"), w);

    JourneyDist family = journey_family(choice);
    const auto names = param_names(family);
    std::vector<double> theta;
    for (const std::string& name : names) {
      theta.push_back(j.at("theta").at(name).get<double>());
    }
    doc.fit.model = JourneyModel{with_params(family, theta), arrival, w};
    doc.fit.theta = std::move(theta);
    doc.fit.log_likelihood = j.value("log_likelihood", 0.0);
    doc.fit.survivor_fraction = j.value("survivor_fraction", 0.0);
    doc.fit.converged = j.value("converged", false);
    doc.fit.iterations = j.value("iterations", 0);
    doc.alpha = j.value("alpha", 0.05);
    doc.seed = j.value("seed", std::uint64_t{0});
    doc.n_records = j.value("n_records", std::size_t{0});
    doc.n_excluded = j.value("n_excluded", std::size_t{0});
    doc.input_path = j.value("input", std::string{});
  } catch (const json::exception& e) {
    throw DataError("invalid fit document " + path + ": " + e.what());
  }
  validate(doc.fit.model.journey);
  return doc;
}

void write_survey_csv(const std::string& path, const SimulatedSurvey& survey) {
  std::ofstream out = open_out(path);
  out << "upstream_time,journey_time,zone\n";
  for (const SimVehicle& v : survey.all_vehicles) {
    out << fmt(v.upstream_time) << ',' << fmt(v.journey_time) << ','
        << zone_number(v.zone) << '\n';
  }
}

void write_marginals_csv(const std::string& path, const FitResult& fit,
                         const Dataset& data) {
  const TruncatedModel model(fit.model);
  std::ofstream out = open_out(path);
  out << "variable,value,fitted_pdf,fitted_cdf,empirical_cdf\n";

  std::vector<double> journey_sorted;
  std::vector<double> arrival_sorted;
  journey_sorted.reserve(data.records.size());
  arrival_sorted.reserve(data.records.size());
  for (const ReidRecord& r : data.records) {
    journey_sorted.push_back(r.journey_time);
    arrival_sorted.push_back(r.upstream_time);
  }
  std::sort(journey_sorted.begin(), journey_sorted.end());
  std::sort(arrival_sorted.begin(), arrival_sorted.end());
  const auto ecdf = [](const std::vector<double>& sorted, double v) {
    if (sorted.empty()) return 0.0;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), v);
    return static_cast<double>(std::distance(sorted.begin(), it)) /
           static_cast<double>(sorted.size());
  };

  constexpr int kGrid = 257;
  const double t_lo = model.journey_support_min();
  const double t_hi = model.journey_support_max();
  for (int i = 0; i < kGrid; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (kGrid - 1);
    out << "journey_time," << fmt(t) << ',' << fmt(model.marginal_journey_pdf(t))
        << ',' << fmt(model.marginal_journey_cdf(t)) << ','
        << fmt(ecdf(journey_sorted, t)) << '\n';
  }

  const SurveyWindows& w = fit.model.windows;
  // Arrival marginal of the truncated model: h(x) * slice mass / C. Its CDF
  // is accumulated on the plot grid (plot data, not an inference surface).
  double cumulative = 0.0;
  double prev_pdf = 0.0;
  const double step = (w.upstream_end - w.upstream_start) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    const double x = w.upstream_start + step * i;
    const double pdf_x =
        arrival_pdf(fit.model.arrival, x) *
        observable_slice_mass(fit.model.journey, w, x) /
        model.normalization().value;
    if (i > 0) cumulative += 0.5 * (prev_pdf + pdf_x) * step;
    prev_pdf = pdf_x;
    out << "arrival_time," << fmt(x) << ',' << fmt(pdf_x) << ','
        << fmt(std::min(1.0, cumulative)) << ',' << fmt(ecdf(arrival_sorted, x))
        << '\n';
  }
}

void write_downstream_csv(const std::string& path, const FitResult& fit,
                          std::size_t n_records) {
  const TruncatedModel model(fit.model);
  const SurveyWindows& w = fit.model.windows;
  std::ofstream out = open_out(path);
  out << "downstream_time,model_density,expected_rate\n";
  constexpr int kGrid = 257;
  for (int i = 0; i < kGrid; ++i) {
    const double y = w.downstream_start +
                     (w.downstream_end - w.downstream_start) * i / (kGrid - 1);
    const double density = model.downstream_arrival_density(y);
    out << fmt(y) << ',' << fmt(density) << ','
        << fmt(density * static_cast<double>(n_records)) << '\n';
  }
}

void write_zones_json(const std::string& path, const FitResult& fit,
                      std::size_t n_records) {
  const ZoneMasses zm = TruncatedModel(fit.model).unobserved_mass();
  json j;
  j["reidfit_version"] = kVersion;
  j["kind"] = "zones";
  j["box_masses"] = {{"early_missed", zm.early_missed},
                     {"observable", zm.observable},
                     {"late_missed", zm.late_missed}};
  j["observed_count"] = n_records;
  j["implied_population"] = zm.implied_population(n_records);
  open_out(path) << j.dump(2) << '\n';
}

void write_ks_json(const std::string& path, const KsReport& report) {
  json j;
  j["reidfit_version"] = kVersion;
  j["kind"] = "ks";
  j["d_n"] = report.d_n;
  j["n"] = report.n;
  j["alpha"] = report.alpha;
  j["critical_value"] = report.critical_value;
  j["p_value"] = report.p_value;
  j["reject"] = report.reject;
  open_out(path) << j.dump(2) << '\n';
}

void write_coverage_json(const std::string& path, const CoverageResult& result,
                         const SimConfig& truth) {
  json j;
  j["reidfit_version"] = kVersion;
  j["kind"] = "coverage";
  j["replications"] = result.replications;
  j["fit_failures"] = result.fit_failures;
  j["alpha"] = result.alpha;
  j["true_mean_journey_time"] = mean(truth.journey);
  if (std::isfinite(result.coverage_mean)) {
    j["coverage_mean"] = result.coverage_mean;
  } else {
    j["coverage_mean"] = nullptr;
  }
  j["coverage_params"] = result.coverage_theta;

  json records = json::array();
  for (const CoverageRecord& r : result.records) {
    json rec;
    rec["replication"] = r.replication;
    rec["fit_ok"] = r.fit_ok;
    if (r.fit_ok) {
      rec["theta_hat"] = r.theta_hat;
      rec["mean_hat"] = r.mean_hat;
      if (r.mean_ci) {
        rec["mean_ci"] = interval_to_json(*r.mean_ci);
        rec["covers_mean"] = r.covers_mean;
      }
      json tci = json::array();
      for (const ParamInterval& iv : r.theta_ci) tci.push_back(interval_to_json(iv));
      rec["theta_ci"] = tci;
      rec["covers_theta"] = r.covers_theta;
    }
    records.push_back(std::move(rec));
  }
  j["records"] = records;
  open_out(path) << j.dump(2) << '\n';
}

}  // namespace reidfit
