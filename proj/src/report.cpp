#include "fpp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fpp {
namespace {

using nlohmann::json;

std::string fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string general(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

// Left-aligned first column, right-aligned numbers, two-space gutters.
std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

// JSON has no inf/nan; those become null.
json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

json matrix(const Matrix2& m) {
  return json::array({json::array({number(m[0][0]), number(m[0][1])}),
                      json::array({number(m[1][0]), number(m[1][1])})});
}

json series(std::span<const double> values) {
  json out = json::array();
  for (const double v : values) out.push_back(number(v));
  return out;
}

json metric_summary(const MetricSummary& s) {
  return {{"median_mse", number(s.median_mse)},
          {"median_mad", number(s.median_mad)},
          {"mad_q1", number(s.mad_q1)},
          {"mad_q3", number(s.mad_q3)},
          {"mad_iqr", number(s.mad_iqr())}};
}

}  // namespace

nlohmann::json to_json(const Truncation& truncation) {
  if (truncation.is_adaptive()) return "auto";
  return truncation.terms();
}

nlohmann::json to_json(const EstimateReport& report) {
  json doc = {{"method", to_string(report.method)},
              {"model", report.poisson ? "PP" : "fPP"},
              {"lambda", number(report.lambda)},
              {"beta", number(report.beta)},
              {"objective", number(report.objective)},
              {"converged", report.converged},
              {"approximate", report.approximate},
              {"evaluations", report.evaluations},
              {"notes", report.notes}};
  doc["covariance"] = report.covariance ? matrix(*report.covariance) : json(nullptr);
  if (report.degeneracy) {
    doc["degeneracy"] = {{"coefficient_at_estimate", number(report.degeneracy->coefficient_at_estimate)},
                         {"required_coefficient", number(report.degeneracy->required_coefficient)},
                         {"interior_solution_exists", report.degeneracy->interior_solution_exists}};
  } else {
    doc["degeneracy"] = nullptr;
  }
  return doc;
}

nlohmann::json to_json(const StudyReport& report) {
  const auto& c = report.config;
  json doc = {{"method", to_string(c.method)},
              {"true_params", {{"lambda", c.lambda}, {"beta", c.beta}}},
              {"t", c.t},
              {"paths", c.paths},
              {"replicates", report.replicates},
              {"requested_replicates", c.method == EstimationMethod::kMle ? c.replicates : c.paths},
              {"excluded_count", report.excluded.size()},
              {"excluded", report.excluded},
              {"approximate_count", report.approximate_count},
              {"seed", c.seed}};
  if (c.method == EstimationMethod::kMle) doc["sample_size"] = c.sample_size;
  if (c.method == EstimationMethod::kMomTwoThreshold) doc["t1"] = c.t1.value_or(c.t / 2.0);
  if (report.replicates > 0) {
    doc["mean"] = {{"lambda", number(report.lambda.mean)}, {"beta", number(report.beta.mean)}};
    doc["bias"] = {{"lambda", number(report.lambda.bias)}, {"beta", number(report.beta.bias)}};
    doc["mse"] = {{"lambda", number(report.lambda.mse)}, {"beta", number(report.beta.mse)}};
  } else {
    doc["mean"] = doc["bias"] = doc["mse"] = nullptr;
  }
  doc["estimates"] = {{"lambda", series(report.lambda_estimates)},
                      {"beta", series(report.beta_estimates)}};
  return doc;
}

nlohmann::json to_json(const KsResult& result) {
  return {{"statistic", number(result.statistic)},
          {"p_value", number(result.p_value)},
          {"n_eff", number(result.n_eff)}};
}

nlohmann::json to_json(const ComparisonReport& report) {
  json tests = json::array();
  std::vector<double> p_values;
  for (const auto& r : report.results) {
    tests.push_back(to_json(r));
    p_values.push_back(r.p_value);
  }
  return {{"mode", to_string(report.config.mode)},
          {"t", report.t},
          {"paths_per_test", report.config.paths_per_test},
          {"tests", report.config.tests},
          {"alpha", report.config.alpha},
          {"seed", report.config.seed},
          {"observed_size", report.observed_size},
          {"not_rejected", report.not_rejected},
          {"rejected", static_cast<int>(report.results.size()) - report.not_rejected},
          {"median_p_value", number(quantile(p_values, 0.5))},
          {"results", tests}};
}

nlohmann::json to_json(const PredictionReport& report) {
  json doc = {{"model", to_string(report.model)},
              {"start_time", report.start_time},
              {"inter_arrivals", series(report.inter_arrivals)},
              {"occurrence_times", series(report.occurrence_times)},
              {"seed", report.seed},
              {"stream_id", report.stream_id}};
  if (report.metrics) {
    doc["metrics"] = {{"mse", number(report.metrics->mse)}, {"mad", number(report.metrics->mad)}};
  } else {
    doc["metrics"] = nullptr;
  }
  return doc;
}

nlohmann::json to_json(const PredictionStudyReport& report) {
  json fpp_mad = json::array();
  json pp_mad = json::array();
  for (const auto& m : report.fpp_metrics) fpp_mad.push_back(number(m.mad));
  for (const auto& m : report.pp_metrics) pp_mad.push_back(number(m.mad));
  return {{"fpp", {{"lambda", report.fpp.lambda()}, {"beta", report.fpp.beta()}}},
          {"pp", {{"lambda", report.pp.lambda()}}},
          {"start_time", report.start_time},
          {"n_future", report.n_future},
          {"replicates", report.replicates},
          {"seed", report.seed},
          {"fpp_summary", metric_summary(report.fpp_summary)},
          {"pp_summary", metric_summary(report.pp_summary)},
          {"fpp_mad", fpp_mad},
          {"pp_mad", pp_mad}};
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::string estimate_table(const EstimateReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"method", std::string(to_string(report.method))},
      {"lambda", fixed(report.lambda, 6)},
      {"beta", fixed(report.beta, 6)},
      {"objective", general(report.objective)},
      {"converged", report.converged ? "yes" : "no"}};
  if (report.approximate) rows.push_back({"likelihood", "Monte Carlo (approximate)"});
  if (report.covariance) {
    rows.push_back({"se(lambda)", fixed(std::sqrt((*report.covariance)[0][0]), 6)});
    rows.push_back({"se(beta)", fixed(std::sqrt((*report.covariance)[1][1]), 6)});
  }
  std::string out = render(rows);
  for (const auto& note : report.notes) out += "note: " + note + '\n';
  return out;
}

std::string study_table(const StudyReport& report) {
  const auto& c = report.config;
  std::string out = std::string(to_string(c.method)) + " study: lambda=" + general(c.lambda) +
                    " beta=" + general(c.beta) + " t=" + general(c.t) + " replicates=" +
                    std::to_string(report.replicates) + " excluded=" +
                    std::to_string(report.excluded.size()) + '\n';
  if (report.replicates == 0) return out + "no converged replicates\n";
  out += render({{"parameter", "mean", "bias", "MSE"},
                 {"lambda", fixed(report.lambda.mean, 4), fixed(report.lambda.bias, 4),
                  fixed(report.lambda.mse, 4)},
                 {"beta", fixed(report.beta.mean, 4), fixed(report.beta.bias, 4),
                  fixed(report.beta.mse, 4)}});
  return out;
}

std::string comparison_table(const ComparisonReport& report) {
  std::vector<double> p_values;
  std::vector<double> stats;
  for (const auto& r : report.results) {
    p_values.push_back(r.p_value);
    stats.push_back(r.statistic);
  }
  return render({{"mode", std::string(to_string(report.config.mode))},
                 {"observed", std::to_string(report.observed_size)},
                 {"tests", std::to_string(report.results.size())},
                 {"median D", fixed(quantile(stats, 0.5), 4)},
                 {"median p", general(quantile(p_values, 0.5))},
                 {"p > " + general(report.config.alpha), std::to_string(report.not_rejected)}});
}

std::string prediction_table(std::span<const PredictionReport> reports,
                             std::span<const double> actual_times) {
  std::vector<std::vector<std::string>> rows;
  std::size_t width = actual_times.size();
  for (const auto& r : reports) width = std::max(width, r.occurrence_times.size());
  std::vector<std::string> header{""};
  for (std::size_t i = 0; i < width; ++i) header.push_back("t" + std::to_string(i + 1));
  rows.push_back(header);
  const auto row = [&](const std::string& label, std::span<const double> values) {
    std::vector<std::string> cells{label};
    for (const double v : values) cells.push_back(fixed(v, 2));
    rows.push_back(cells);
  };
  for (const auto& r : reports) row(std::string(to_string(r.model)) + "-IA", r.inter_arrivals);
  for (const auto& r : reports) row(std::string(to_string(r.model)) + "-TO", r.occurrence_times);
  if (!actual_times.empty()) row("Actual-TO", actual_times);
  std::string out = render(rows);

  bool any_metrics = false;
  std::vector<std::vector<std::string>> metric_rows{{"", "n", "MSE", "MAD"}};
  for (const auto& r : reports) {
    if (!r.metrics) continue;
    any_metrics = true;
    metric_rows.push_back({std::string(to_string(r.model)),
                           std::to_string(r.occurrence_times.size()), fixed(r.metrics->mse, 2),
                           fixed(r.metrics->mad, 2)});
  }
  if (any_metrics) out += '\n' + render(metric_rows);
  return out;
}

std::string prediction_study_table(const PredictionStudyReport& report) {
  const auto row = [](const std::string& label, const MetricSummary& s) {
    return std::vector<std::string>{label, fixed(s.median_mse, 2), fixed(s.median_mad, 2),
                                    fixed(s.mad_q1, 2), fixed(s.mad_q3, 2), fixed(s.mad_iqr(), 2)};
  };
  return "prediction study: replicates=" + std::to_string(report.replicates) +
         " start=" + general(report.start_time) + " n=" + std::to_string(report.n_future) +
         '\n' +
         render({{"model", "median MSE", "median MAD", "MAD Q1", "MAD Q3", "MAD IQR"},
                 row("fPP", report.fpp_summary),
                 row("PP", report.pp_summary)});
}

std::string paths_csv(std::span<const ArrivalPath> paths) {
  std::string out = "path_id,event_index,time\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& times = paths[p].times();
    for (std::size_t i = 0; i < times.size(); ++i) {
      out += std::to_string(p) + ',' + std::to_string(i) + ',' + fixed(times[i], 6) + '\n';
    }
  }
  return out;
}

std::string ecdf_csv(const Ecdf& ecdf) {
  std::string out = "x,F\n";
  for (const auto& step : ecdf.steps()) out += fixed(step.x, 6) + ',' + fixed(step.F, 6) + '\n';
  return out;
}

std::string qq_csv(std::span<const QqPoint> points) {
  std::string out = "theoretical,sample\n";
  for (const auto& p : points) out += fixed(p.theoretical, 6) + ',' + fixed(p.sample, 6) + '\n';
  return out;
}

std::string prediction_csv(std::span<const double> fpp_times, std::span<const double> pp_times,
                           std::span<const double> actual_times) {
  const std::size_t rows = std::max({fpp_times.size(), pp_times.size(), actual_times.size()});
  const auto cell = [](std::span<const double> values, std::size_t i) {
    return i < values.size() ? fixed(values[i], 6) : std::string();
  };
  std::string out = "index,fpp_to,pp_to,actual_to\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1) + ',' + cell(fpp_times, i) + ',' + cell(pp_times, i) + ',' +
           cell(actual_times, i) + '\n';
  }
  return out;
}

std::string svg_plot(std::span<const SvgSeries> series, std::string_view title,
                     std::string_view x_label, std::string_view y_label) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 400.0;
  constexpr double kMargin = 50.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::domain_error("svg_plot: x and y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const auto px = [&](double x) {
    return kMargin + (x - x_min) / (x_max - x_min) * (kWidth - 2.0 * kMargin);
  };
  const auto py = [&](double y) {
    return kHeight - kMargin - (y - y_min) / (y_max - y_min) * (kHeight - 2.0 * kMargin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
  svg << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n";
  svg << "<line x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  svg << "<line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n";
  svg << "<text x=\"320\" y=\"385\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label)
      << " [" << general(x_min) << ", " << general(x_max) << "]</text>\n";
  svg << "<text x=\"14\" y=\"200\" text-anchor=\"middle\" font-size=\"12\" "
         "transform=\"rotate(-90 14 200)\">"
      << xml_escape(y_label) << " [" << general(y_min) << ", " << general(y_max) << "]</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (s.step && i > 0) svg << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i - 1]), 2) << ' ';
      svg << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kWidth - kMargin - 100.0 << "\" y=\"" << 60.0 + 16.0 * k
        << "\" font-size=\"12\" fill=\"" << color << "\">" << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot replace " + path.string());
  }
}

}  // namespace fpp
