#include "fpp/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fpp/special_functions.hpp"

namespace fpp {
namespace {

constexpr long double kCancellationRatio = 1e12L;
constexpr long double kTailRelative = 1e-8L;
constexpr long double kAdaptiveNegligible = 1e-20L;

void require_positive_finite(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::domain_error(std::string(what) + " must be finite and > 0, got " +
                            std::to_string(value));
  }
}

// Counts renewals in (0, t] without storing the path.
template <typename Params>
std::int64_t count_arrivals(const Params& params, double t, RngStream& rng) {
  std::int64_t count = 0;
  double clock = 0.0;
  for (;;) {
    clock += sample_interarrival(params, rng);
    if (clock > t) return count;
    ++count;
  }
}

}  // namespace

FppParams::FppParams(double lambda, double beta) : lambda_(lambda), beta_(beta) {
  require_positive_finite(lambda, "FppParams: lambda");
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::domain_error("FppParams: beta must lie in (0, 1], got " + std::to_string(beta));
  }
}

double FppParams::q() const { return lambda_ * std::exp(-log_gamma(1.0 + beta_)); }

PoissonParams::PoissonParams(double lambda) : lambda_(lambda) {
  require_positive_finite(lambda, "PoissonParams: lambda");
}

ArrivalPath::ArrivalPath(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (!(horizon >= 0.0 && std::isfinite(horizon))) {
    throw std::domain_error("ArrivalPath: horizon must be finite and >= 0");
  }
  double previous = -std::numeric_limits<double>::infinity();
  for (const double tau : times_) {
    if (!std::isfinite(tau) || tau < 0.0 || tau > horizon_) {
      throw std::domain_error("ArrivalPath: event time outside [0, horizon]");
    }
    if (tau < previous) throw std::domain_error("ArrivalPath: times must be nondecreasing");
    previous = tau;
  }
}

Truncation Truncation::fixed(int terms) {
  if (terms < 0) throw std::domain_error("Truncation: K must be >= 0");
  return Truncation(terms);
}

double kanter_waiting_time(const FppParams& params, double u1, double u2, double u3) {
  const double beta = params.beta();
  if (beta == 1.0) return -std::log(u1) / params.lambda();

  const double inv_beta = 1.0 / beta;
  const double pi = std::numbers::pi;
  const double log_core = inv_beta * std::log(-std::log(u1)) +
                          std::log(std::sin(beta * pi * u2)) +
                          (inv_beta - 1.0) * std::log(std::sin((1.0 - beta) * pi * u2)) -
                          inv_beta * std::log(std::sin(pi * u2)) -
                          (inv_beta - 1.0) * std::log(-std::log(u3));
  // lambda enters only through this prefactor
  return std::pow(params.lambda(), -inv_beta) * std::exp(log_core);
}

double sample_interarrival(const FppParams& params, RngStream& rng) {
  const double u1 = rng.uniform_open();
  if (params.beta() == 1.0) return kanter_waiting_time(params, u1, 0.5, 0.5);
  const double u2 = rng.uniform_open();
  const double u3 = rng.uniform_open();
  return kanter_waiting_time(params, u1, u2, u3);
}

double sample_interarrival(const PoissonParams& params, RngStream& rng) {
  return -std::log(rng.uniform_open()) / params.lambda();
}

double sample_interarrival(const RenewalModel& model, RngStream& rng) {
  return std::visit([&](const auto& params) { return sample_interarrival(params, rng); },
                    model);
}

ArrivalPath simulate_path(const RenewalModel& model, double horizon, RngStream& rng) {
  require_positive_finite(horizon, "simulate_path: horizon");
  std::vector<double> times;
  double clock = 0.0;
  for (;;) {
    clock += sample_interarrival(model, rng);
    if (clock > horizon) break;
    times.push_back(clock);
  }
  return ArrivalPath(std::move(times), horizon);
}

CountObservation count_at(const ArrivalPath& path, double t) {
  if (!(t > 0.0 && t <= path.horizon())) {
    throw std::domain_error("count_at: t must lie in (0, horizon]");
  }
  const auto& times = path.times();
  const auto first_positive = std::upper_bound(times.begin(), times.end(), 0.0);
  const auto past_t = std::upper_bound(first_positive, times.end(), t);
  return CountObservation{static_cast<std::int64_t>(past_t - first_positive), t};
}

PmfSeries::PmfSeries(const FppParams& params, double t, Truncation truncation)
    : beta_(params.beta()),
      log_x_(std::log(static_cast<long double>(params.lambda())) +
             static_cast<long double>(params.beta()) * std::log(static_cast<long double>(t))),
      truncation_(truncation) {
  require_positive_finite(t, "fpp_pmf: t");
}

long double PmfSeries::log_gamma_scaled(std::int64_t j) {
  const auto index = static_cast<std::size_t>(j);
  while (scaled_cache_.size() <= index) {
    scaled_cache_.push_back(
        log_gamma_ext(beta_ * static_cast<long double>(scaled_cache_.size()) + 1.0L));
  }
  return scaled_cache_[index];
}

long double PmfSeries::log_factorial(std::int64_t j) {
  const auto index = static_cast<std::size_t>(j);
  while (factorial_cache_.size() <= index) {
    factorial_cache_.push_back(
        log_gamma_ext(static_cast<long double>(factorial_cache_.size()) + 1.0L));
  }
  return factorial_cache_[index];
}

PmfValue PmfSeries::operator()(std::int64_t n) {
  if (n < 0) return PmfValue{0.0, true, 0, 0.0};
  if (beta_ == 1.0) {
    // Poisson closed form; the alternating series cancels badly for large x.
    const long double log_p = static_cast<long double>(n) * log_x_ - std::exp(log_x_) - log_factorial(n);
    const auto p = static_cast<double>(std::exp(log_p));
    return PmfValue{p, true, 0, p};
  }

  const auto log_term = [&](std::int64_t k) {
    const std::int64_t j = n + k;
    return static_cast<long double>(j) * log_x_ + log_factorial(j) - log_factorial(n) -
           log_factorial(k) - log_gamma_scaled(j);
  };

  std::vector<long double> logs;
  bool converged = true;
  if (truncation_.is_adaptive()) {
    long double largest = -std::numeric_limits<long double>::infinity();
    converged = false;
    for (std::int64_t k = 0; k <= Truncation::kAdaptiveCap; ++k) {
      const long double current = log_term(k);
      logs.push_back(current);
      largest = std::max(largest, current);
      if (k > 0 && current < logs[logs.size() - 2] &&
          current - largest < std::log(kAdaptiveNegligible)) {
        converged = true;
        break;
      }
    }
  } else {
    const int terms = truncation_.terms();
    logs.reserve(static_cast<std::size_t>(terms) + 1);
    for (std::int64_t k = 0; k <= terms; ++k) logs.push_back(log_term(k));
  }

  const long double largest = *std::max_element(logs.begin(), logs.end());
  long double sum = 0.0L;
  long double compensation = 0.0L;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    const long double magnitude = std::exp(logs[k] - largest);
    const long double term = (k % 2 == 0) ? magnitude : -magnitude;
    const long double next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      compensation += (sum - next) + term;
    } else {
      compensation += (term - next) + sum;
    }
    sum = next;
  }
  const long double scale = std::exp(largest);
  const long double result = (sum + compensation) * scale;

  if (!truncation_.is_adaptive()) {
    // The first omitted term bounds the truncation error once terms decrease.
    const auto k_next = static_cast<std::int64_t>(logs.size());
    const long double next_log = log_term(k_next);
    const long double tail = std::exp(next_log);
    converged = next_log < logs.back() && tail <= kTailRelative * std::fabs(result);
  }

  PmfValue out;
  out.value = static_cast<double>(result);
  out.terms_used = static_cast<int>(logs.size());
  out.max_term = static_cast<double>(scale);
  out.reliable = std::isfinite(out.value) && converged &&
                 scale <= kCancellationRatio * std::fabs(result) && result >= 0.0L &&
                 result <= 1.0L + 1e-9L;
  return out;
}

PmfValue fpp_pmf(const FppParams& params, std::int64_t n, double t, Truncation truncation) {
  if (n < 0) throw std::domain_error("fpp_pmf: n must be >= 0");
  PmfSeries series(params, t, truncation);
  return series(n);
}

std::vector<double> count_distribution_mc(const RenewalModel& model, double t,
                                          std::int64_t sims, const RngStream& rng) {
  require_positive_finite(t, "count_distribution_mc: t");
  if (sims < 1) throw std::domain_error("count_distribution_mc: sims must be >= 1");
  std::vector<std::int64_t> hits;
  for (std::int64_t i = 0; i < sims; ++i) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(i));
    const std::int64_t count = std::visit(
        [&](const auto& params) { return count_arrivals(params, t, stream); }, model);
    if (static_cast<std::size_t>(count) >= hits.size()) {
      hits.resize(static_cast<std::size_t>(count) + 1, 0);
    }
    ++hits[static_cast<std::size_t>(count)];
  }
  std::vector<double> fractions(hits.size());
  for (std::size_t n = 0; n < hits.size(); ++n) {
    fractions[n] = static_cast<double>(hits[n]) / static_cast<double>(sims);
  }
  return fractions;
}

MonteCarloEstimate fpp_pmf_mc(const FppParams& params, std::int64_t n, double t,
                              std::int64_t sims, const RngStream& rng) {
  if (sims < 1000) throw std::domain_error("fpp_pmf_mc: sims must be >= 1000");
  if (n < 0) throw std::domain_error("fpp_pmf_mc: n must be >= 0");
  const auto fractions = count_distribution_mc(params, t, sims, rng);
  MonteCarloEstimate out;
  out.sims = sims;
  out.estimate =
      static_cast<std::size_t>(n) < fractions.size() ? fractions[static_cast<std::size_t>(n)] : 0.0;
  out.std_error =
      std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(sims));
  out.degenerate = out.estimate == 0.0;
  return out;
}

StableMixturePmf::StableMixturePmf(std::int64_t sims, RngStream rng) {
  if (sims < 1) throw std::domain_error("StableMixturePmf: sims must be >= 1");
  angle_.resize(static_cast<std::size_t>(sims));
  log_exp_.resize(static_cast<std::size_t>(sims));
  for (std::size_t i = 0; i < angle_.size(); ++i) {
    angle_[i] = rng.uniform_open();
    log_exp_[i] = std::log(-std::log(rng.uniform_open()));
  }
}

std::vector<double> StableMixturePmf::log_pmf(const FppParams& params, double t,
                                              std::span<const std::int64_t> n) const {
  require_positive_finite(t, "StableMixturePmf: t");
  const double beta = params.beta();
  const double pi = std::numbers::pi;
  const double log_scale = std::log(params.lambda()) + beta * std::log(t);

  // log of the Poisson mean for each draw; S = 1 at beta = 1
  std::vector<double> log_mu(angle_.size(), log_scale);
  if (beta < 1.0) {
    const double inv_beta = 1.0 / beta;
    for (std::size_t i = 0; i < angle_.size(); ++i) {
      const double u = angle_[i];
      const double log_s = std::log(std::sin(beta * pi * u)) +
                           (inv_beta - 1.0) * std::log(std::sin((1.0 - beta) * pi * u)) -
                           inv_beta * std::log(std::sin(pi * u)) -
                           (inv_beta - 1.0) * log_exp_[i];
      log_mu[i] -= beta * log_s;
    }
  }

  std::vector<double> mu(log_mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = std::exp(log_mu[i]);

  std::vector<double> out;
  out.reserve(n.size());
  std::vector<double> terms(angle_.size());
  for (const std::int64_t k : n) {
    if (k < 0) {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const double kd = static_cast<double>(k);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log_mu.size(); ++i) {
      terms[i] = kd * log_mu[i] - mu[i];
      peak = std::max(peak, terms[i]);
    }
    double sum = 0.0;
    for (const double term : terms) sum += std::exp(term - peak);
    out.push_back(peak + std::log(sum / static_cast<double>(terms.size())) -
                  log_gamma(kd + 1.0));
  }
  return out;
}

double fpp_mean(const FppParams& params, double t) {
  require_positive_finite(t, "fpp_mean: t");
  return params.q() * std::pow(t, params.beta());
}

double fpp_variance(const FppParams& params, double t, VarianceForm form) {
  require_positive_finite(t, "fpp_variance: t");
  const double beta = params.beta();
  const double mean = fpp_mean(params, t);
  if (form == VarianceForm::kBetaCoefficient) {
    return mean * (1.0 + mean * (variance_coefficient(beta) - 1.0));
  }
  const double scaled = params.lambda() * std::pow(t, beta);
  const double bracket =
      std::exp(-log_gamma(2.0 * beta)) - std::exp(-2.0 * log_gamma(beta)) / beta;
  return mean + scaled * scaled / beta * bracket;
}

double poisson_pmf(double rate_times_t, std::int64_t n) {
  if (n < 0) return 0.0;
  const double k = static_cast<double>(n);
  return std::exp(k * std::log(rate_times_t) - rate_times_t - log_gamma(k + 1.0));
}

}  // namespace fpp
