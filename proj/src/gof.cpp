#include "fpp/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/distributions/normal.hpp>

namespace fpp {
namespace {

constexpr double kSeriesTolerance = 1e-10;

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  for (const double v : out) {
    if (std::isnan(v)) throw std::domain_error("gof: NaN sample");
  }
  std::sort(out.begin(), out.end());
  return out;
}

KsResult finish(double statistic, double n_eff) {
  KsResult out;
  out.statistic = std::clamp(statistic, 0.0, 1.0);
  out.n_eff = n_eff;
  out.p_value = std::clamp(kolmogorov_survival(std::sqrt(n_eff) * out.statistic), 0.0, 1.0);
  return out;
}

}  // namespace

Ecdf::Ecdf(std::vector<double> samples) : points_(std::move(samples)) {
  if (points_.empty()) throw std::domain_error("ecdf: need at least one sample");
  for (const double v : points_) {
    if (std::isnan(v)) throw std::domain_error("ecdf: NaN sample");
  }
  std::sort(points_.begin(), points_.end());
}

double Ecdf::operator()(double x) const {
  const auto upper = std::upper_bound(points_.begin(), points_.end(), x);
  return static_cast<double>(upper - points_.begin()) / static_cast<double>(points_.size());
}

std::vector<Ecdf::Step> Ecdf::steps() const {
  std::vector<Step> out;
  const double n = static_cast<double>(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i + 1 < points_.size() && points_[i + 1] == points_[i]) continue;
    out.push_back({points_[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

Ecdf ecdf(std::span<const double> samples) {
  return Ecdf(std::vector<double>(samples.begin(), samples.end()));
}

double kolmogorov_survival(double x) {
  if (std::isnan(x)) throw std::domain_error("kolmogorov_survival: NaN argument");
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // 1 - sqrt(2 pi)/x * sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
      sum += term;
      if (term < kSeriesTolerance * std::max(sum, 1e-300)) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    sign = -sign;
    if (term < kSeriesTolerance) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::domain_error("ks_two_sample: empty sample");
  const auto a = sorted_copy(x);
  const auto b = sorted_copy(y);
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());

  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // Past the end of one sample the other's ECDF only moves toward 1, which
  // cannot widen the gap beyond what was already seen.
  return finish(d, n * m / (n + m));
}

KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::domain_error("ks_one_sample: empty sample");
  const auto a = sorted_copy(x);
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double f = cdf(a[k]);
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::domain_error("ks_one_sample: cdf value outside [0, 1]");
    }
    const double above = static_cast<double>(k + 1) / n - f;
    const double below = f - static_cast<double>(k) / n;
    d = std::max({d, std::fabs(above), std::fabs(below)});
  }
  return finish(d, n);
}

std::vector<QqPoint> qq_normal(std::span<const double> samples) {
  if (samples.size() < 2) throw std::domain_error("qq_normal: need at least two samples");
  const auto a = sorted_copy(samples);
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (const double v : a) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : a) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw std::domain_error("qq_normal: zero sample variance");

  const boost::math::normal_distribution<double> standard;
  std::vector<QqPoint> out;
  out.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double position = (static_cast<double>(k) + 0.5) / n;
    out.push_back({boost::math::quantile(standard, position), (a[k] - mean) / sd});
  }
  return out;
}

KsResult normality_test(std::span<const double> samples) {
  if (samples.size() < 2) throw std::domain_error("normality_test: need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw std::domain_error("normality_test: zero sample variance");
  std::vector<double> z;
  z.reserve(samples.size());
  for (const double v : samples) z.push_back((v - mean) / sd);
  const boost::math::normal_distribution<double> standard;
  return ks_one_sample(z, [&](double x) { return boost::math::cdf(standard, x); });
}

std::string_view to_string(ComparisonMode mode) {
  return mode == ComparisonMode::kInterArrival ? "interarrival" : "times";
}

ComparisonMode parse_comparison_mode(std::string_view name) {
  if (name == "interarrival" || name == "inter-arrival") return ComparisonMode::kInterArrival;
  if (name == "times" || name == "event-times") return ComparisonMode::kEventTimes;
  throw std::invalid_argument("unknown comparison mode: " + std::string(name));
}

void ComparisonConfig::validate() const {
  if (paths_per_test < 1) throw std::domain_error("comparison: paths_per_test must be >= 1");
  if (tests < 1) throw std::domain_error("comparison: tests must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("comparison: alpha must be in (0, 1)");
}

std::vector<double> comparison_sample(std::span<const double> times, double t,
                                      ComparisonMode mode) {
  std::vector<double> kept;
  for (const double tau : times) {
    if (tau > 0.0 && tau <= t) kept.push_back(tau);
  }
  std::sort(kept.begin(), kept.end());
  if (mode == ComparisonMode::kEventTimes) return kept;

  std::vector<double> gaps;
  gaps.reserve(kept.size());
  double previous = 0.0;
  for (const double tau : kept) {
    const double day = std::floor(tau);
    gaps.push_back(day - previous);
    previous = day;
  }
  return gaps;
}

ComparisonReport compare_to_model(std::span<const double> observed_times, double t,
                                  const RenewalModel& model, const ComparisonConfig& config) {
  config.validate();
  if (!(t > 0.0 && std::isfinite(t))) throw std::domain_error("compare_to_model: t must be > 0");
  const auto observed = comparison_sample(observed_times, t, config.mode);
  if (observed.empty()) throw std::domain_error("compare_to_model: no observed events in (0, t]");

  ComparisonReport report;
  report.config = config;
  report.t = t;
  report.observed_size = observed.size();
  report.results.reserve(static_cast<std::size_t>(config.tests));
  for (int i = 0; i < config.tests; ++i) {
    const RngStream test_stream(config.seed, static_cast<std::uint64_t>(i));
    std::vector<double> pooled;
    for (int j = 0; j < config.paths_per_test; ++j) {
      RngStream path_stream = test_stream.substream(static_cast<std::uint64_t>(j));
      const ArrivalPath path = simulate_path(model, t, path_stream);
      const auto part = comparison_sample(path.times(), t, config.mode);
      pooled.insert(pooled.end(), part.begin(), part.end());
    }
    // A reference sample with no events cannot match data that has some.
    const KsResult result =
        pooled.empty() ? KsResult{1.0, 0.0, 0.0} : ks_two_sample(observed, pooled);
    if (result.p_value > config.alpha) ++report.not_rejected;
    report.results.push_back(result);
  }
  return report;
}

}  // namespace fpp
