#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fpp/estimation.hpp"
#include "fpp/gof.hpp"
#include "fpp/predict.hpp"
#include "fpp/process.hpp"

namespace fpp {

nlohmann::json to_json(const Truncation& truncation);
nlohmann::json to_json(const EstimateReport& report);
nlohmann::json to_json(const StudyReport& report);
nlohmann::json to_json(const KsResult& result);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const PredictionReport& report);
nlohmann::json to_json(const PredictionStudyReport& report);

/// Two-space indent, trailing newline.
std::string dump(const nlohmann::json& doc);

std::string estimate_table(const EstimateReport& report);
/// Mean, bias and MSE rows per parameter.
std::string study_table(const StudyReport& report);
std::string comparison_table(const ComparisonReport& report);
/// Rows model-IA, model-TO for each report, then Actual-TO when given.
std::string prediction_table(std::span<const PredictionReport> reports,
                             std::span<const double> actual_times);
std::string prediction_study_table(const PredictionStudyReport& report);

/// `path_id,event_index,time`, times with 6 decimals.
std::string paths_csv(std::span<const ArrivalPath> paths);
/// `x,F`, one row per ECDF step.
std::string ecdf_csv(const Ecdf& ecdf);
/// `theoretical,sample`.
std::string qq_csv(std::span<const QqPoint> points);
/// `index,fpp_to,pp_to,actual_to`; a missing column is left empty.
std::string prediction_csv(std::span<const double> fpp_times, std::span<const double> pp_times,
                           std::span<const double> actual_times);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Draw as a right-continuous step function.
  bool step = false;
};

std::string svg_plot(std::span<const SvgSeries> series, std::string_view title,
                     std::string_view x_label, std::string_view y_label);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fpp
