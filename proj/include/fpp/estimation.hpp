#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/process.hpp"

namespace fpp {

enum class EstimationMethod { kMomSingle, kMomTwoThreshold, kMle, kPpRate };

std::string_view to_string(EstimationMethod method);
/// Accepts "mom", "mom-single", "mom2t", "mom-two-threshold", "mle", "pp", "pp-rate".
EstimationMethod parse_method(std::string_view name);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Why single-threshold moment matching cannot recover beta < 1: the
/// variance coefficient c(beta) would have to equal 1 - 1/n_t, but c >= 1 on (0, 1].
struct MomDegeneracy {
  double coefficient_at_estimate = 1.0;
  double required_coefficient = 0.0;
  bool interior_solution_exists = false;
};

struct EstimateReport {
  EstimationMethod method = EstimationMethod::kPpRate;
  bool poisson = false;
  double lambda = 0.0;
  /// 1 for the Poisson fit.
  double beta = 1.0;
  /// Final residual (moment methods) or log-likelihood (MLE); 0 for closed forms.
  double objective = 0.0;
  bool converged = true;
  /// The likelihood at the estimate used the Monte Carlo pmf.
  bool approximate = false;
  int evaluations = 0;
  std::optional<Matrix2> covariance;
  std::optional<MomDegeneracy> degeneracy;
  std::vector<std::string> notes;
};

/// Optimizer settings shared by the MoM and MLE searches. The search runs in
/// unconstrained coordinates: lambda = exp(a) and
/// beta = min(1, (1 + 1e-3) / (1 + exp(-b))), a logistic map onto (0, 1].
struct SolverConfig {
  int max_iters = 2000;
  double tolerance = 1e-10;
  double xtol = 1e-7;
  double initial_step = 0.5;
  /// Starting beta values; empty selects the method default.
  std::vector<double> beta_starts;
  /// Hold beta fixed and fit lambda alone.
  std::optional<double> fixed_beta;

  void validate() const;
};

/// Seeds the Monte Carlo pmf used when the series pmf is unreliable.
struct McFallback {
  std::uint64_t seed = 0;
  std::int64_t sims = 10000;
};

struct LogLikelihood {
  double value = 0.0;
  bool approximate = false;
};

struct InformationMatrix {
  Matrix2 information{};
  std::optional<Matrix2> covariance;
  bool positive_definite = false;
  /// beta sat within one step of 1, so beta differences were taken backwards.
  bool one_sided_beta = false;
};

struct ErrorMetrics {
  double bias = 0.0;
  double mse = 0.0;
  double mad = 0.0;
};

struct ParameterSummary {
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
};

struct StudyConfig {
  double lambda = 2.0;
  double beta = 0.8;
  double t = 300.0;
  int paths = 1000;
  /// MLE replicates. Moment and rate studies fit every path once instead.
  int replicates = 1000;
  /// Paths drawn per MLE replicate.
  int sample_size = 50;
  EstimationMethod method = EstimationMethod::kMomSingle;
  /// First threshold of the two-threshold MoM; defaults to t / 2.
  std::optional<double> t1;
  Truncation truncation = Truncation::fixed(Truncation::kDefaultTerms);
  SolverConfig solver;
  std::int64_t mc_sims = 10000;
  std::uint64_t seed = 0;
};

struct StudyReport {
  StudyConfig config;
  /// Estimates of the replicates that converged, in replicate order.
  std::vector<double> lambda_estimates;
  std::vector<double> beta_estimates;
  std::vector<int> excluded;
  int replicates = 0;
  int approximate_count = 0;
  ParameterSummary lambda;
  ParameterSummary beta;
};

EstimateReport fit_pp(const CountObservation& obs);

EstimateReport fit_mom_single(const CountObservation& obs, const SolverConfig& config = {});

EstimateReport fit_mom_two_threshold(std::int64_t n1, std::int64_t n2, double t1, double t2);

/// Sum of ln p_beta(n_i, t). Unreliable series values are replaced by the
/// StableMixturePmf estimate from one batch of draws seeded by `fallback`;
/// the same draws serve every n and every parameter value.
LogLikelihood log_likelihood(const FppParams& params, std::span<const CountObservation> counts,
                             Truncation truncation, const McFallback& fallback = {});

LogLikelihood log_likelihood(const FppParams& params, std::span<const std::int64_t> counts,
                             double t, Truncation truncation, const McFallback& fallback = {});

EstimateReport fit_mle(std::span<const std::int64_t> counts, double t, Truncation truncation,
                       const SolverConfig& config = {}, const McFallback& fallback = {});

/// Negative Hessian of the log-likelihood by central differences with
/// step max(1e-4, 1e-4 |theta_i|).
InformationMatrix observed_information(const FppParams& params,
                                       std::span<const std::int64_t> counts, double t,
                                       Truncation truncation, const McFallback& fallback = {});

StudyReport estimator_study(const StudyConfig& config);

ErrorMetrics error_metrics(std::span<const double> estimates, std::span<const double> truth);

/// Bias and MSE of a list of estimates against a single true value.
ParameterSummary summarize(std::span<const double> estimates, double truth);

}  // namespace fpp
