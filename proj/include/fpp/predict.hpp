#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fpp/process.hpp"

namespace fpp {

enum class ModelTag { kFpp, kPp };

std::string_view to_string(ModelTag tag);
ModelTag tag_of(const RenewalModel& model);

struct PredictionMetrics {
  double mse = 0.0;
  double mad = 0.0;
};

struct PredictionReport {
  ModelTag model = ModelTag::kFpp;
  double start_time = 0.0;
  std::vector<double> inter_arrivals;
  /// start_time plus running sums of inter_arrivals.
  std::vector<double> occurrence_times;
  std::optional<PredictionMetrics> metrics;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Draws n_future waiting times with the renewal clock restarted at
/// start_time (no memory of the wait already elapsed).
PredictionReport predict_future(const RenewalModel& model, double start_time, int n_future,
                                RngStream& rng);

/// Fills metrics from error_metrics(occurrence_times, actual_times).
PredictionReport attach_metrics(PredictionReport report, std::span<const double> actual_times);

struct MetricSummary {
  double median_mse = 0.0;
  double median_mad = 0.0;
  double mad_q1 = 0.0;
  double mad_q3 = 0.0;
  double mad_iqr() const { return mad_q3 - mad_q1; }
};

struct PredictionStudyReport {
  FppParams fpp{1.0, 1.0};
  PoissonParams pp{1.0};
  double start_time = 0.0;
  int n_future = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<PredictionMetrics> fpp_metrics;
  std::vector<PredictionMetrics> pp_metrics;
  MetricSummary fpp_summary;
  MetricSummary pp_summary;
};

/// Replicate r feeds the fPP from RngStream(seed, r).substream(0) and the PP
/// from .substream(1).
PredictionStudyReport prediction_study(const FppParams& fpp, const PoissonParams& pp,
                                       double start_time, int n_future,
                                       std::span<const double> actual_times, int replicates,
                                       std::uint64_t seed);

/// Linearly interpolated sample quantile (the "type 7" rule), p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace fpp
