#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fpp/process.hpp"

namespace fpp {

/// Right-continuous empirical distribution function; tied points stack.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);

  /// Fraction of samples <= x.
  double operator()(double x) const;
  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  struct Step {
    double x;
    double F;
  };
  /// One step per distinct point, with F the value at and right of x.
  std::vector<Step> steps() const;

 private:
  std::vector<double> points_;
};

Ecdf ecdf(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double n_eff = 0.0;
};

/// Q(x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2), the limiting survival of
/// sqrt(n) D. Small x switches to the Jacobi-transformed series, which
/// converges there in a handful of terms.
double kolmogorov_survival(double x);

/// D computed exactly over the merged grid; asymptotic p-value with
/// n_eff = nm / (n + m).
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// cdf must map into [0, 1]; values outside throw std::domain_error.
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

struct QqPoint {
  double theoretical;
  double sample;
};

/// Normal Q-Q pairs at plotting positions (k - 0.5) / n; the sample is
/// standardized by its mean and SD (n - 1 denominator).
std::vector<QqPoint> qq_normal(std::span<const double> samples);

/// One-sample K-S of the standardized sample (mean 0, SD 1 with n - 1
/// denominator) against the standard normal.
KsResult normality_test(std::span<const double> samples);

/// What gets compared between observed and simulated paths.
enum class ComparisonMode {
  /// Day-floored waiting times, origin at 0.
  kInterArrival,
  /// Raw event times in (0, t].
  kEventTimes,
};

std::string_view to_string(ComparisonMode mode);
/// Accepts "interarrival" / "inter-arrival" and "times" / "event-times".
ComparisonMode parse_comparison_mode(std::string_view name);

struct ComparisonConfig {
  ComparisonMode mode = ComparisonMode::kInterArrival;
  /// Simulated paths pooled into the reference sample of each test.
  int paths_per_test = 5;
  int tests = 100;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ComparisonReport {
  ComparisonConfig config;
  double t = 0.0;
  std::size_t observed_size = 0;
  std::vector<KsResult> results;
  /// Tests with p_value > alpha.
  int not_rejected = 0;
};

/// Observed sample the comparison feeds to K-S: waiting times between
/// successive events (origin at 0) or event times, restricted to (0, t].
std::vector<double> comparison_sample(std::span<const double> times, double t,
                                      ComparisonMode mode);

/// Battery of two-sample K-S tests of observed events against the model.
/// Test i pools paths_per_test paths simulated to horizon t from
/// RngStream(seed, i).substream(j).
ComparisonReport compare_to_model(std::span<const double> observed_times, double t,
                                  const RenewalModel& model, const ComparisonConfig& config);

}  // namespace fpp
