#include "fpp/predict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpp/estimation.hpp"

namespace fpp {
namespace {

MetricSummary summarize_metrics(const std::vector<PredictionMetrics>& metrics) {
  std::vector<double> mse;
  std::vector<double> mad;
  mse.reserve(metrics.size());
  mad.reserve(metrics.size());
  for (const auto& m : metrics) {
    mse.push_back(m.mse);
    mad.push_back(m.mad);
  }
  MetricSummary out;
  out.median_mse = quantile(mse, 0.5);
  out.median_mad = quantile(mad, 0.5);
  out.mad_q1 = quantile(mad, 0.25);
  out.mad_q3 = quantile(std::move(mad), 0.75);
  return out;
}

}  // namespace

std::string_view to_string(ModelTag tag) { return tag == ModelTag::kFpp ? "fPP" : "PP"; }

ModelTag tag_of(const RenewalModel& model) {
  return std::holds_alternative<FppParams>(model) ? ModelTag::kFpp : ModelTag::kPp;
}

PredictionReport predict_future(const RenewalModel& model, double start_time, int n_future,
                                RngStream& rng) {
  if (n_future < 1) throw std::domain_error("predict_future: n_future must be >= 1");
  if (!(start_time >= 0.0 && std::isfinite(start_time))) {
    throw std::domain_error("predict_future: start_time must be finite and >= 0");
  }
  PredictionReport report;
  report.model = tag_of(model);
  report.start_time = start_time;
  report.seed = rng.seed();
  report.stream_id = rng.stream_id();
  double clock = start_time;
  for (int i = 0; i < n_future; ++i) {
    const double wait = sample_interarrival(model, rng);
    clock += wait;
    report.inter_arrivals.push_back(wait);
    report.occurrence_times.push_back(clock);
  }
  return report;
}

PredictionReport attach_metrics(PredictionReport report, std::span<const double> actual_times) {
  if (actual_times.size() != report.occurrence_times.size()) {
    throw std::domain_error("attach_metrics: predicted and actual lengths differ");
  }
  const ErrorMetrics m = error_metrics(report.occurrence_times, actual_times);
  report.metrics = PredictionMetrics{m.mse, m.mad};
  return report;
}

PredictionStudyReport prediction_study(const FppParams& fpp, const PoissonParams& pp,
                                       double start_time, int n_future,
                                       std::span<const double> actual_times, int replicates,
                                       std::uint64_t seed) {
  if (replicates < 1) throw std::domain_error("prediction_study: replicates must be >= 1");
  if (actual_times.size() != static_cast<std::size_t>(std::max(n_future, 0))) {
    throw std::domain_error("prediction_study: need one actual time per predicted event");
  }
  PredictionStudyReport report{fpp, pp, start_time, n_future, replicates, seed, {}, {}, {}, {}};
  report.fpp_metrics.reserve(static_cast<std::size_t>(replicates));
  report.pp_metrics.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    const RngStream pair(seed, static_cast<std::uint64_t>(r));
    RngStream fpp_stream = pair.substream(0);
    RngStream pp_stream = pair.substream(1);
    report.fpp_metrics.push_back(
        *attach_metrics(predict_future(fpp, start_time, n_future, fpp_stream), actual_times)
             .metrics);
    report.pp_metrics.push_back(
        *attach_metrics(predict_future(pp, start_time, n_future, pp_stream), actual_times)
             .metrics);
  }
  report.fpp_summary = summarize_metrics(report.fpp_metrics);
  report.pp_summary = summarize_metrics(report.pp_metrics);
  return report;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::domain_error("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace fpp
