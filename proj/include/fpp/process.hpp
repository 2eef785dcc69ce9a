#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fpp/rng.hpp"

namespace fpp {

/// Fractional Poisson process parameters: rate lambda > 0 (events per day^beta)
/// and fractional order beta in (0, 1].
class FppParams {
 public:
  FppParams(double lambda, double beta);

  double lambda() const { return lambda_; }
  double beta() const { return beta_; }
  /// q = lambda / Gamma(1 + beta), the mean-count prefactor.
  double q() const;

 private:
  double lambda_;
  double beta_;
};

class PoissonParams {
 public:
  explicit PoissonParams(double lambda);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

using RenewalModel = std::variant<FppParams, PoissonParams>;

/// Nondecreasing event times on [0, horizon].
class ArrivalPath {
 public:
  ArrivalPath(std::vector<double> times, double horizon);

  const std::vector<double>& times() const { return times_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  double horizon_;
};

struct CountObservation {
  std::int64_t count = 0;
  double threshold = 1.0;
};

struct PmfValue {
  double value = 0.0;
  bool reliable = false;
  int terms_used = 0;
  /// Largest |term| of the series scaled like the result.
  double max_term = 0.0;
};

/// Number of series terms for the pmf. Fixed(K) sums k = 0..K exactly;
/// Adaptive sums until the terms are negligible (capped). Neither applies at
/// beta = 1, where the Poisson pmf is returned directly.
class Truncation {
 public:
  static constexpr int kDefaultTerms = 49;
  static constexpr int kAdaptiveCap = 5000;

  static Truncation fixed(int terms);
  static Truncation adaptive() { return Truncation(-1); }

  bool is_adaptive() const { return terms_ < 0; }
  int terms() const { return terms_; }

 private:
  explicit Truncation(int terms) : terms_(terms) {}
  int terms_;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t sims = 0;
  /// Zero hits: estimate and standard error are both 0.
  bool degenerate = false;
};

enum class VarianceForm { kBetaCoefficient, kAlternative };

/// Kanter's exact Mittag-Leffler waiting time from three uniforms in (0,1).
/// At beta = 1 only u1 is used: T = -ln(u1) / lambda.
double kanter_waiting_time(const FppParams& params, double u1, double u2, double u3);

/// Draws one waiting time. Consumes one uniform at beta = 1, three otherwise.
double sample_interarrival(const FppParams& params, RngStream& rng);
double sample_interarrival(const PoissonParams& params, RngStream& rng);
double sample_interarrival(const RenewalModel& model, RngStream& rng);

/// Renewal path on (0, horizon]; the first arrival past the horizon is dropped.
ArrivalPath simulate_path(const RenewalModel& model, double horizon, RngStream& rng);

/// Count of arrivals with 0 < tau <= t. An event at exactly tau = 0 is the
/// time origin and is not counted.
CountObservation count_at(const ArrivalPath& path, double t);

/// Counting-process pmf p_beta(n, t) via the alternating series
///
///   p = (x^n / n!) sum_k (n+k)!/k! (-x)^k / Gamma(beta (k+n) + 1),  x = lambda t^beta,
///
/// summed in extended precision from log-magnitudes. The result is flagged
/// unreliable when the largest term exceeds 1e12 |result|, when it falls
/// outside [0, 1 + 1e-9], or when the series has not converged at the
/// requested truncation.
PmfValue fpp_pmf(const FppParams& params, std::int64_t n, double t,
                 Truncation truncation = Truncation::fixed(Truncation::kDefaultTerms));

/// Reusable pmf evaluator for one (lambda, beta, t); caches the
/// ln Gamma(beta j + 1) table across many n.
class PmfSeries {
 public:
  PmfSeries(const FppParams& params, double t, Truncation truncation);
  PmfValue operator()(std::int64_t n);

 private:
  long double log_gamma_scaled(std::int64_t j);
  long double log_factorial(std::int64_t j);

  long double beta_;
  long double log_x_;
  Truncation truncation_;
  std::vector<long double> scaled_cache_;
  std::vector<long double> factorial_cache_;
};

/// Empirical distribution of count_at(t) over `sims` simulated paths.
/// Path i draws from rng.substream(i); result[n] is the fraction with count n.
std::vector<double> count_distribution_mc(const RenewalModel& model, double t,
                                          std::int64_t sims, const RngStream& rng);

/// Monte Carlo pmf with binomial standard error. Requires sims >= 1000.
MonteCarloEstimate fpp_pmf_mc(const FppParams& params, std::int64_t n, double t,
                              std::int64_t sims, const RngStream& rng);

/// Count pmf by conditioning on the stable time change:
/// N(t) | S ~ Poisson(lambda * (t / S)^beta), S positive beta-stable.
/// The mixing uniforms are drawn once, so the estimate is smooth in (lambda, beta)
/// and strictly positive.
class StableMixturePmf {
 public:
  StableMixturePmf(std::int64_t sims, RngStream rng);

  /// log pmf at each n, averaged over the stored draws.
  std::vector<double> log_pmf(const FppParams& params, double t,
                              std::span<const std::int64_t> n) const;
  std::int64_t sims() const { return static_cast<std::int64_t>(angle_.size()); }

 private:
  std::vector<double> angle_;    // uniform on (0, 1)
  std::vector<double> log_exp_;  // log of a unit exponential
};

double fpp_mean(const FppParams& params, double t);
double fpp_variance(const FppParams& params, double t,
                    VarianceForm form = VarianceForm::kBetaCoefficient);

double poisson_pmf(double rate_times_t, std::int64_t n);

}  // namespace fpp
