#include "fpp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpp/estimation.hpp"
#include "fpp/gof.hpp"
#include "fpp/predict.hpp"
#include "fpp/process.hpp"
#include "fpp/report.hpp"
#include "fpp/wildfire_data.hpp"

namespace fpp {
namespace {

using nlohmann::json;

// Bad flags or input that cannot be read or parsed; exits with 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string format = "table";
  std::string out;
};

void add_output(CLI::App* cmd, Output& o, const std::string& out_help) {
  cmd->add_option("--format", o.format, "Report printed to stdout")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, out_help);
}

Truncation parse_truncation(const std::string& text) {
  if (text == "auto") return Truncation::adaptive();
  int k = 0;
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, k);
  if (result.ec != std::errc{} || result.ptr != end || k < 0) {
    throw UsageError("--K must be a non-negative integer or 'auto'");
  }
  return Truncation::fixed(k);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  return in;
}

// First column of a CSV or plain list; a non-numeric first line is a header.
std::vector<double> read_values(const std::string& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comma = line.find(',');
    std::string cell = line.substr(0, comma);
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      values.push_back(v);
    } catch (const std::exception&) {
      if (row == 1) continue;
      throw UsageError(path + ": row " + std::to_string(row) + ": not a number '" + cell + "'");
    }
  }
  if (values.empty()) throw UsageError(path + ": no values");
  return values;
}

std::vector<std::int64_t> read_counts(const std::string& path) {
  std::vector<std::int64_t> counts;
  for (const double v : read_values(path)) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9e15) {
      throw UsageError(path + ": counts must be non-negative integers");
    }
    counts.push_back(static_cast<std::int64_t>(v));
  }
  return counts;
}

ArrivalPath read_event_path(const std::string& path, const std::string& format) {
  try {
    return to_offsets(load_events(path, parse_event_format(format)));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

void emit(const Output& o, const json& doc, const std::string& table, std::ostream& out) {
  if (!o.out.empty()) write_atomic(o.out, dump(doc));
  out << (o.format == "json" ? dump(doc) : table);
}

json solver_json(const SolverConfig& s) {
  return {{"max_iters", s.max_iters},
          {"tolerance", s.tolerance},
          {"xtol", s.xtol},
          {"initial_step", s.initial_step},
          {"beta_starts", s.beta_starts},
          {"fixed_beta", s.fixed_beta ? json(*s.fixed_beta) : json(nullptr)}};
}

void add_solver(CLI::App* cmd, SolverConfig& s, std::optional<double>& fixed_beta) {
  cmd->add_option("--max-iters", s.max_iters, "Simplex iteration cap")->capture_default_str();
  cmd->add_option("--tolerance", s.tolerance, "Simplex value spread for convergence")
      ->capture_default_str();
  cmd->add_option("--xtol", s.xtol, "Simplex diameter for convergence")->capture_default_str();
  cmd->add_option("--beta-start", s.beta_starts, "Starting beta values (repeatable)");
  cmd->add_option("--fixed-beta", fixed_beta, "Hold beta fixed and fit lambda only");
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string model = "fpp";
  double lambda = 1.0;
  double beta = 0.8;
  double horizon = 0.0;
  int paths = 1;
  std::uint64_t seed = 0;
  Output output;
};

RenewalModel make_model(const std::string& name, double lambda, double beta) {
  if (name == "pp") return PoissonParams(lambda);
  return FppParams(lambda, beta);
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  const RenewalModel model = make_model(a.model, a.lambda, a.beta);
  std::vector<ArrivalPath> paths;
  const RngStream root(a.seed, 0);
  for (int i = 0; i < a.paths; ++i) {
    RngStream stream = root.substream(static_cast<std::uint64_t>(i));
    paths.push_back(simulate_path(model, a.horizon, stream));
  }
  json config = {{"subcommand", "simulate"}, {"model", a.model}, {"lambda", a.lambda},
                 {"horizon", a.horizon},     {"paths", a.paths}, {"seed", a.seed}};
  if (a.model == "fpp") config["beta"] = a.beta;
  json counts = json::array();
  std::vector<double> count_values;
  for (const auto& p : paths) {
    counts.push_back(p.size());
    count_values.push_back(static_cast<double>(p.size()));
  }
  json doc = {{"config", config}, {"counts", counts}};
  json times = json::array();
  for (const auto& p : paths) times.push_back(p.times());
  doc["times"] = times;

  if (!a.output.out.empty()) write_atomic(a.output.out, paths_csv(paths));
  if (a.output.format == "json") {
    out << dump(doc);
  } else {
    double mean = 0.0;
    for (const double c : count_values) mean += c;
    mean /= static_cast<double>(count_values.size());
    out << "simulated " << a.paths << " path(s) of " << a.model << " to horizon " << a.horizon
        << "; mean count " << mean << '\n';
  }
  return 0;
}

// ---- fit ---------------------------------------------------------------------

struct FitArgs {
  std::string method;
  std::string events;
  std::string events_format = "generic";
  std::string counts_file;
  std::optional<std::int64_t> count;
  double t = 0.0;
  std::optional<double> t1;
  std::string K = "49";
  std::optional<std::uint64_t> seed;
  std::int64_t mc_sims = 10000;
  SolverConfig solver;
  std::optional<double> fixed_beta;
  Output output;
};

int run_fit(FitArgs a, std::ostream& out) {
  const EstimationMethod method = parse_method(a.method);
  const Truncation truncation = parse_truncation(a.K);
  a.solver.fixed_beta = a.fixed_beta;
  a.solver.validate();
  const int sources = (a.events.empty() ? 0 : 1) + (a.counts_file.empty() ? 0 : 1) +
                      (a.count ? 1 : 0);
  if (sources != 1) throw UsageError("give exactly one of --events, --counts, --count");
  if (method == EstimationMethod::kMle && !a.seed) {
    throw UsageError("--seed is required for --method mle");
  }

  std::vector<std::int64_t> counts;
  std::optional<ArrivalPath> path;
  if (!a.events.empty()) {
    path = read_event_path(a.events, a.events_format);
    const ArrivalPath extended(path->times(), std::max(path->horizon(), a.t));
    counts.push_back(count_at(extended, a.t).count);
    path = extended;
  } else if (!a.counts_file.empty()) {
    counts = read_counts(a.counts_file);
  } else {
    if (*a.count < 0) throw UsageError("--count must be >= 0");
    counts.push_back(*a.count);
  }
  const bool single = counts.size() == 1;

  EstimateReport report;
  json observations = {{"t", a.t}, {"counts", counts}};
  switch (method) {
    case EstimationMethod::kPpRate:
      if (!single) throw UsageError("--method pp takes one observation");
      report = fit_pp({counts.front(), a.t});
      break;
    case EstimationMethod::kMomSingle:
      if (!single) throw UsageError("--method mom takes one observation");
      report = fit_mom_single({counts.front(), a.t}, a.solver);
      break;
    case EstimationMethod::kMomTwoThreshold: {
      if (!path) throw UsageError("--method mom2t needs --events");
      const double t1 = a.t1.value_or(a.t / 2.0);
      const auto n1 = count_at(*path, t1).count;
      observations["t1"] = t1;
      observations["n1"] = n1;
      report = fit_mom_two_threshold(n1, counts.front(), t1, a.t);
      break;
    }
    case EstimationMethod::kMle:
      report = fit_mle(counts, a.t, truncation, a.solver, McFallback{*a.seed, a.mc_sims});
      break;
  }

  json config = {{"subcommand", "fit"},
                 {"method", to_string(method)},
                 {"events", a.events.empty() ? json(nullptr) : json(a.events)},
                 {"events_format", a.events_format},
                 {"counts", a.counts_file.empty() ? json(nullptr) : json(a.counts_file)},
                 {"t", a.t},
                 {"t1", a.t1 ? json(*a.t1) : json(nullptr)},
                 {"K", to_json(truncation)},
                 {"seed", a.seed ? json(*a.seed) : json(nullptr)},
                 {"mc_sims", a.mc_sims},
                 {"solver", solver_json(a.solver)}};
  const json doc = {{"config", config}, {"observations", observations}, {"fit", to_json(report)}};
  emit(a.output, doc, estimate_table(report), out);
  return 0;
}

// ---- study -------------------------------------------------------------------

struct StudyArgs {
  std::string method;
  StudyConfig config;
  std::string K = "49";
  std::optional<double> fixed_beta;
  Output output;
};

int run_study(StudyArgs a, std::ostream& out) {
  a.config.method = parse_method(a.method);
  if (a.config.method == EstimationMethod::kPpRate) {
    throw UsageError("study supports mom, mom2t and mle");
  }
  a.config.truncation = parse_truncation(a.K);
  a.config.solver.fixed_beta = a.fixed_beta;
  const StudyReport report = estimator_study(a.config);

  const auto& c = a.config;
  json config = {{"subcommand", "study"},
                 {"method", to_string(c.method)},
                 {"lambda", c.lambda},
                 {"beta", c.beta},
                 {"t", c.t},
                 {"t1", c.t1 ? json(*c.t1) : json(nullptr)},
                 {"paths", c.paths},
                 {"sample", c.sample_size},
                 {"reps", c.replicates},
                 {"K", to_json(c.truncation)},
                 {"mc_sims", c.mc_sims},
                 {"seed", c.seed},
                 {"solver", solver_json(c.solver)}};
  json doc = to_json(report);
  doc["config"] = config;
  std::string table = study_table(report);
  if (report.replicates >= 2) {
    json normality = json::object();
    for (const auto& [name, values] :
         {std::pair{"lambda", &report.lambda_estimates}, std::pair{"beta", &report.beta_estimates}}) {
      try {
        const KsResult ks = normality_test(*values);
        normality[name] = to_json(ks);
        table += std::string("normality K-S ") + name + ": D=" + std::to_string(ks.statistic) +
                 " p=" + std::to_string(ks.p_value) + '\n';
      } catch (const std::domain_error&) {
        normality[name] = nullptr;
      }
    }
    doc["normality"] = normality;
  }
  emit(a.output, doc, table, out);
  return 0;
}

// ---- gof ---------------------------------------------------------------------

struct GofArgs {
  std::string events;
  std::string events_format = "generic";
  double t = 0.0;
  double fpp_lambda = 0.0;
  double fpp_beta = 0.0;
  std::optional<double> pp_lambda;
  std::string mode = "interarrival";
  ComparisonConfig comparison;
  Output output;
};

int run_gof(GofArgs a, std::ostream& out) {
  a.comparison.mode = parse_comparison_mode(a.mode);
  const ArrivalPath path = read_event_path(a.events, a.events_format);
  const ArrivalPath extended(path.times(), std::max(path.horizon(), a.t));
  const auto n_t = count_at(extended, a.t).count;
  const double pp_lambda = a.pp_lambda.value_or(fit_pp({n_t, a.t}).lambda);
  if (!(pp_lambda > 0.0)) throw UsageError("no events in (0, t]; cannot fit the PP rate");

  const ComparisonReport fpp_report =
      compare_to_model(path.times(), a.t, FppParams(a.fpp_lambda, a.fpp_beta), a.comparison);
  const ComparisonReport pp_report =
      compare_to_model(path.times(), a.t, PoissonParams(pp_lambda), a.comparison);

  json config = {{"subcommand", "gof"},
                 {"events", a.events},
                 {"events_format", a.events_format},
                 {"t", a.t},
                 {"fpp_lambda", a.fpp_lambda},
                 {"fpp_beta", a.fpp_beta},
                 {"pp_lambda", pp_lambda},
                 {"mode", to_string(a.comparison.mode)},
                 {"paths_per_test", a.comparison.paths_per_test},
                 {"tests", a.comparison.tests},
                 {"alpha", a.comparison.alpha},
                 {"seed", a.comparison.seed}};
  const json doc = {{"config", config},
                    {"count_at_t", n_t},
                    {"fpp", to_json(fpp_report)},
                    {"pp", to_json(pp_report)}};
  const std::string table = "count_at(t) = " + std::to_string(n_t) + "\n\nfPP\n" +
                            comparison_table(fpp_report) + "\nPP\n" + comparison_table(pp_report);
  emit(a.output, doc, table, out);
  return 0;
}

// ---- predict -----------------------------------------------------------------

struct PredictArgs {
  double fpp_lambda = 0.0;
  double fpp_beta = 0.0;
  double pp_lambda = 0.0;
  std::optional<double> start;
  std::string events;
  std::string events_format = "generic";
  std::optional<double> t;
  int n = 10;
  std::string actual;
  int reps = 1;
  std::uint64_t seed = 0;
  Output output;
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  double start = 0.0;
  if (a.start) {
    start = *a.start;
  } else if (!a.events.empty()) {
    const ArrivalPath path = read_event_path(a.events, a.events_format);
    const double limit = a.t.value_or(path.horizon());
    const auto& times = path.times();
    const auto last = std::upper_bound(times.begin(), times.end(), limit);
    if (last == times.begin()) throw UsageError("no events at or before t");
    start = *std::prev(last);
  } else {
    throw UsageError("give --start or --events");
  }
  std::vector<double> actual;
  if (!a.actual.empty()) {
    actual = read_values(a.actual);
    if (actual.size() != static_cast<std::size_t>(a.n)) {
      throw UsageError("--actual must hold exactly --n values");
    }
  }

  const FppParams fpp(a.fpp_lambda, a.fpp_beta);
  const PoissonParams pp(a.pp_lambda);
  const RngStream pair(a.seed, 0);
  RngStream fpp_stream = pair.substream(0);
  RngStream pp_stream = pair.substream(1);
  std::vector<PredictionReport> reports = {predict_future(fpp, start, a.n, fpp_stream),
                                           predict_future(pp, start, a.n, pp_stream)};
  if (!actual.empty()) {
    for (auto& r : reports) r = attach_metrics(std::move(r), actual);
  }

  json config = {{"subcommand", "predict"},
                 {"fpp_lambda", a.fpp_lambda},
                 {"fpp_beta", a.fpp_beta},
                 {"pp_lambda", a.pp_lambda},
                 {"start", start},
                 {"events", a.events.empty() ? json(nullptr) : json(a.events)},
                 {"n", a.n},
                 {"actual", a.actual.empty() ? json(nullptr) : json(a.actual)},
                 {"reps", a.reps},
                 {"seed", a.seed}};
  json doc = {{"config", config},
              {"fpp", to_json(reports[0])},
              {"pp", to_json(reports[1])},
              {"actual_times", actual}};
  std::string table = prediction_table(reports, actual);
  if (a.reps > 1) {
    if (actual.empty()) throw UsageError("--reps > 1 needs --actual");
    const auto study = prediction_study(fpp, pp, start, a.n, actual, a.reps, a.seed);
    doc["study"] = to_json(study);
    table += '\n' + prediction_study_table(study);
  }
  emit(a.output, doc, table, out);
  return 0;
}

// ---- plot --------------------------------------------------------------------

struct PlotArgs {
  std::string kind;
  std::string values;
  std::string events;
  std::string events_format = "generic";
  std::optional<double> t;
  std::string mode = "interarrival";
  std::string study;
  std::string param = "lambda";
  std::string prediction;
  std::optional<double> fpp_lambda;
  std::optional<double> fpp_beta;
  std::optional<double> pp_lambda;
  std::optional<std::uint64_t> seed;
  std::string svg;
  std::string out;
};

json read_json(const std::string& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> json_numbers(const json& node, const std::string& what) {
  if (!node.is_array()) throw UsageError(what + " is not an array");
  std::vector<double> out;
  for (const auto& v : node) {
    if (!v.is_number()) throw UsageError(what + " holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

SvgSeries ecdf_series(const std::string& label, std::span<const double> sample) {
  SvgSeries s{label, {}, {}, true};
  for (const auto& step : ecdf(sample).steps()) {
    s.x.push_back(step.x);
    s.y.push_back(step.F);
  }
  return s;
}

int run_plot(const PlotArgs& a, std::ostream& out) {
  std::string csv;
  std::vector<SvgSeries> series;
  std::string title;
  std::string x_label;
  std::string y_label;

  if (a.kind == "ecdf") {
    std::vector<double> sample;
    const ComparisonMode mode = parse_comparison_mode(a.mode);
    if (!a.values.empty() == !a.events.empty()) throw UsageError("give one of --values, --events");
    double t = 0.0;
    if (!a.events.empty()) {
      const ArrivalPath path = read_event_path(a.events, a.events_format);
      t = a.t.value_or(path.horizon());
      sample = comparison_sample(path.times(), t, mode);
      if (sample.empty()) throw UsageError("no events in (0, t]");
    } else {
      sample = read_values(a.values);
    }
    csv = ecdf_csv(ecdf(sample));
    series.push_back(ecdf_series("data", sample));
    const bool overlay = a.fpp_lambda || a.pp_lambda;
    if (overlay) {
      if (a.events.empty()) throw UsageError("model overlays need --events");
      if (!a.seed) throw UsageError("--seed is required for model overlays");
      const RngStream root(*a.seed, 0);
      if (a.fpp_lambda) {
        if (!a.fpp_beta) throw UsageError("--fpp-lambda needs --fpp-beta");
        RngStream s = root.substream(0);
        const auto sim =
            comparison_sample(simulate_path(FppParams(*a.fpp_lambda, *a.fpp_beta), t, s).times(),
                              t, mode);
        if (!sim.empty()) series.push_back(ecdf_series("fPP", sim));
      }
      if (a.pp_lambda) {
        RngStream s = root.substream(1);
        const auto sim =
            comparison_sample(simulate_path(PoissonParams(*a.pp_lambda), t, s).times(), t, mode);
        if (!sim.empty()) series.push_back(ecdf_series("PP", sim));
      }
    }
    title = "ECDF";
    x_label = mode == ComparisonMode::kInterArrival ? "inter-arrival (days)" : "time";
    y_label = "F";
  } else if (a.kind == "qq") {
    std::vector<double> sample;
    if (!a.values.empty() == !a.study.empty()) throw UsageError("give one of --values, --study");
    if (!a.values.empty()) {
      sample = read_values(a.values);
    } else {
      const json doc = read_json(a.study);
      if (!doc.contains("estimates") || !doc["estimates"].contains(a.param)) {
        throw UsageError(a.study + ": no estimates for " + a.param);
      }
      sample = json_numbers(doc["estimates"][a.param], "estimates." + a.param);
    }
    const auto points = qq_normal(sample);
    csv = qq_csv(points);
    SvgSeries pts{"sample", {}, {}, false};
    SvgSeries line{"y = x", {points.front().theoretical, points.back().theoretical},
                   {points.front().theoretical, points.back().theoretical}, false};
    for (const auto& p : points) {
      pts.x.push_back(p.theoretical);
      pts.y.push_back(p.sample);
    }
    series = {pts, line};
    title = "Normal Q-Q";
    x_label = "theoretical";
    y_label = "sample";
  } else {
    if (a.prediction.empty()) throw UsageError("plot prediction needs --prediction");
    const json doc = read_json(a.prediction);
    if (!doc.contains("fpp") || !doc.contains("pp")) {
      throw UsageError(a.prediction + ": not a predict report");
    }
    const auto fpp = json_numbers(doc["fpp"]["occurrence_times"], "fpp.occurrence_times");
    const auto pp = json_numbers(doc["pp"]["occurrence_times"], "pp.occurrence_times");
    const auto actual = doc.contains("actual_times")
                            ? json_numbers(doc["actual_times"], "actual_times")
                            : std::vector<double>{};
    csv = prediction_csv(fpp, pp, actual);
    const auto index_series = [](const std::string& label, const std::vector<double>& v) {
      SvgSeries s{label, {}, v, false};
      for (std::size_t i = 0; i < v.size(); ++i) s.x.push_back(static_cast<double>(i + 1));
      return s;
    };
    series = {index_series("fPP", fpp), index_series("PP", pp)};
    if (!actual.empty()) series.push_back(index_series("actual", actual));
    title = "Predicted and actual occurrence times";
    x_label = "event index";
    y_label = "days from origin";
  }

  if (!a.out.empty()) {
    write_atomic(a.out, csv);
  } else {
    out << csv;
  }
  if (!a.svg.empty()) write_atomic(a.svg, svg_plot(series, title, x_label, y_label));
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional Poisson process toolkit", "fpp"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate arrival paths");
  simulate->add_option("--model", sim.model, "fpp or pp")
      ->check(CLI::IsMember({"fpp", "pp"}))
      ->capture_default_str();
  simulate->add_option("--lambda", sim.lambda, "Rate parameter")->required();
  simulate->add_option("--beta", sim.beta, "Fractional order (fpp)")->capture_default_str();
  simulate->add_option("--horizon,--t", sim.horizon, "Simulation horizon")->required();
  simulate->add_option("--paths", sim.paths, "Number of paths")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->required();
  add_output(simulate, sim.output, "CSV of event times (path_id,event_index,time)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate parameters from observed counts");
  fit_cmd->add_option("--method", fit.method, "pp | mom | mom2t | mle")
      ->required()
      ->check(CLI::IsMember({"pp", "mom", "mom2t", "mle"}));
  fit_cmd->add_option("--events", fit.events, "Event log CSV");
  fit_cmd->add_option("--events-format", fit.events_format, "generic or noaa")
      ->check(CLI::IsMember({"generic", "noaa"}))
      ->capture_default_str();
  fit_cmd->add_option("--counts", fit.counts_file, "File of counts at --t, one per line");
  fit_cmd->add_option("--count", fit.count, "A single count at --t");
  fit_cmd->add_option("--t", fit.t, "Threshold time")->required()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--t1", fit.t1, "First threshold for mom2t (default t/2)")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--K", fit.K, "Series truncation: integer or auto")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Seed for the Monte Carlo pmf (mle)");
  fit_cmd->add_option("--mc-sims", fit.mc_sims, "Monte Carlo pmf draws")
      ->check(CLI::Range(std::int64_t{1000}, std::numeric_limits<std::int64_t>::max()))
      ->capture_default_str();
  add_solver(fit_cmd, fit.solver, fit.fixed_beta);
  add_output(fit_cmd, fit.output, "JSON report");

  StudyArgs study;
  auto* study_cmd = app.add_subcommand("study", "Replicated estimator study");
  study_cmd->add_option("--method", study.method, "mom | mom2t | mle")
      ->required()
      ->check(CLI::IsMember({"mom", "mom2t", "mle"}));
  study_cmd->add_option("--lambda", study.config.lambda, "True lambda")->required();
  study_cmd->add_option("--beta", study.config.beta, "True beta")->required();
  study_cmd->add_option("--t", study.config.t, "Threshold time")->required();
  study_cmd->add_option("--t1", study.config.t1, "First threshold for mom2t (default t/2)");
  study_cmd->add_option("--paths", study.config.paths, "Simulated paths")->capture_default_str();
  study_cmd->add_option("--sample", study.config.sample_size, "Paths per MLE replicate")
      ->capture_default_str();
  study_cmd->add_option("--reps", study.config.replicates, "MLE replicates")
      ->capture_default_str();
  study_cmd->add_option("--K", study.K, "Series truncation: integer or auto")
      ->capture_default_str();
  study_cmd->add_option("--mc-sims", study.config.mc_sims, "Monte Carlo pmf draws")
      ->check(CLI::Range(std::int64_t{1000}, std::numeric_limits<std::int64_t>::max()))
      ->capture_default_str();
  study_cmd->add_option("--seed", study.config.seed, "Random seed")->required();
  add_solver(study_cmd, study.config.solver, study.fixed_beta);
  add_output(study_cmd, study.output, "JSON report");

  GofArgs gof;
  auto* gof_cmd = app.add_subcommand("gof", "K-S comparison of observed events with fitted models");
  gof_cmd->add_option("--events", gof.events, "Event log CSV")->required();
  gof_cmd->add_option("--events-format", gof.events_format, "generic or noaa")
      ->check(CLI::IsMember({"generic", "noaa"}))
      ->capture_default_str();
  gof_cmd->add_option("--t", gof.t, "Threshold time")->required()->check(CLI::PositiveNumber);
  gof_cmd->add_option("--fpp-lambda", gof.fpp_lambda, "Fitted fPP lambda")->required();
  gof_cmd->add_option("--fpp-beta", gof.fpp_beta, "Fitted fPP beta")->required();
  gof_cmd->add_option("--pp-lambda", gof.pp_lambda, "Fitted PP rate (default count/t)");
  gof_cmd->add_option("--mode", gof.mode, "interarrival or times")
      ->check(CLI::IsMember({"interarrival", "times"}))
      ->capture_default_str();
  gof_cmd->add_option("--paths-per-test", gof.comparison.paths_per_test,
                      "Simulated paths pooled per test")
      ->capture_default_str();
  gof_cmd->add_option("--tests", gof.comparison.tests, "Number of seeded tests")
      ->capture_default_str();
  gof_cmd->add_option("--alpha", gof.comparison.alpha, "Significance level")
      ->capture_default_str();
  gof_cmd->add_option("--seed", gof.comparison.seed, "Random seed")->required();
  add_output(gof_cmd, gof.output, "JSON report");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Forecast future occurrence times");
  predict_cmd->add_option("--fpp-lambda", pred.fpp_lambda, "fPP lambda")->required();
  predict_cmd->add_option("--fpp-beta", pred.fpp_beta, "fPP beta")->required();
  predict_cmd->add_option("--pp-lambda", pred.pp_lambda, "PP rate")->required();
  predict_cmd->add_option("--start", pred.start, "Prediction start time (default: last event)");
  predict_cmd->add_option("--events", pred.events, "Event log used for the default start");
  predict_cmd->add_option("--events-format", pred.events_format, "generic or noaa")
      ->check(CLI::IsMember({"generic", "noaa"}))
      ->capture_default_str();
  predict_cmd->add_option("--t", pred.t, "Only events at or before t set the default start");
  predict_cmd->add_option("--n", pred.n, "Future events")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_option("--actual", pred.actual, "Actual occurrence times, one per line");
  predict_cmd->add_option("--reps", pred.reps, "Replicates for the paired study")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_option("--seed", pred.seed, "Random seed")->required();
  add_output(predict_cmd, pred.output, "JSON report");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Emit plot data as CSV and optional SVG");
  plot_cmd->add_option("kind", plot.kind, "ecdf | qq | prediction")
      ->required()
      ->check(CLI::IsMember({"ecdf", "qq", "prediction"}));
  plot_cmd->add_option("--values", plot.values, "Sample file, one value per line");
  plot_cmd->add_option("--events", plot.events, "Event log CSV (ecdf)");
  plot_cmd->add_option("--events-format", plot.events_format, "generic or noaa")
      ->check(CLI::IsMember({"generic", "noaa"}))
      ->capture_default_str();
  plot_cmd->add_option("--t", plot.t, "Threshold time (ecdf)");
  plot_cmd->add_option("--mode", plot.mode, "interarrival or times (ecdf)")
      ->check(CLI::IsMember({"interarrival", "times"}))
      ->capture_default_str();
  plot_cmd->add_option("--study", plot.study, "Study JSON (qq)");
  plot_cmd->add_option("--param", plot.param, "lambda or beta (qq)")
      ->check(CLI::IsMember({"lambda", "beta"}))
      ->capture_default_str();
  plot_cmd->add_option("--prediction", plot.prediction, "Predict JSON (prediction)");
  plot_cmd->add_option("--fpp-lambda", plot.fpp_lambda, "Overlay a simulated fPP ECDF");
  plot_cmd->add_option("--fpp-beta", plot.fpp_beta, "fPP beta for the overlay");
  plot_cmd->add_option("--pp-lambda", plot.pp_lambda, "Overlay a simulated PP ECDF");
  plot_cmd->add_option("--seed", plot.seed, "Seed for overlays");
  plot_cmd->add_option("--svg", plot.svg, "Also write an SVG rendering");
  plot_cmd->add_option("--out", plot.out, "CSV output (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return run_simulate(sim, out);
    if (*fit_cmd) return run_fit(fit, out);
    if (*study_cmd) return run_study(study, out);
    if (*gof_cmd) return run_gof(gof, out);
    if (*predict_cmd) return run_predict(pred, out);
    return run_plot(plot, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace fpp
