#include "fpp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "fpp/nelder_mead.hpp"
#include "fpp/special_functions.hpp"

namespace fpp {
namespace {

constexpr double kBetaHeadroom = 1e-3;
constexpr double kLogLambdaBound = 40.0;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Stream tags separating the study's independent random streams.
constexpr std::uint64_t kSelectionTag = 0x5E1EC7ULL;
constexpr std::uint64_t kFallbackTag = 0xFA11BACCULL;

double beta_from(double b) {
  return std::min(1.0, (1.0 + kBetaHeadroom) / (1.0 + std::exp(-b)));
}

double unconstrained_beta(double beta) {
  const double p = beta / (1.0 + kBetaHeadroom);
  return std::log(p / (1.0 - p));
}

// Maps a simplex point to (lambda, beta); nullopt outside the search box.
struct ParameterMap {
  std::optional<double> fixed_beta;

  std::optional<FppParams> operator()(const std::vector<double>& x) const {
    if (!(std::fabs(x[0]) <= kLogLambdaBound)) return std::nullopt;
    const double beta = fixed_beta ? *fixed_beta : beta_from(x[1]);
    if (!(beta > 0.0)) return std::nullopt;
    return FppParams(std::exp(x[0]), beta);
  }

  std::vector<double> start(double lambda, double beta) const {
    std::vector<double> x{std::log(lambda)};
    if (!fixed_beta) x.push_back(unconstrained_beta(beta));
    return x;
  }
};

NelderMeadOptions options_from(const SolverConfig& config) {
  NelderMeadOptions options;
  options.max_iters = config.max_iters;
  options.ftol = config.tolerance;
  options.xtol = config.xtol;
  options.initial_step = config.initial_step;
  return options;
}

// Lambda that puts the theoretical mean at `mean` for the given beta.
double moment_matched_lambda(double mean, double beta, double t) {
  return mean * std::exp(log_gamma(1.0 + beta)) / std::pow(t, beta);
}

double mom_objective(const FppParams& params, double n, double t) {
  const double mean = fpp_mean(params, t);
  const double second = mean + variance_coefficient(params.beta()) * mean * mean;
  const double r1 = (mean - n) / n;
  const double r2 = (second - n * n) / (n * n);
  return r1 * r1 + r2 * r2;
}

std::map<std::int64_t, std::int64_t> tally(std::span<const std::int64_t> counts) {
  std::map<std::int64_t, std::int64_t> multiplicity;
  for (const auto n : counts) {
    if (n < 0) throw std::domain_error("counts must be nonnegative");
    ++multiplicity[n];
  }
  return multiplicity;
}

double mean_of(std::span<const std::int64_t> counts) {
  double sum = 0.0;
  for (const auto n : counts) sum += static_cast<double>(n);
  return sum / static_cast<double>(counts.size());
}

void store_estimate(EstimateReport& report, const FppParams& params) {
  report.lambda = params.lambda();
  report.beta = params.beta();
}

// One restart from the best point with a smaller simplex. Kinks (the pmf
// switching to Monte Carlo) and the flat beta = 1 cap can stall a search.
template <typename Objective>
void polish(const Objective& objective, const SolverConfig& config, NelderMeadResult& best,
            EstimateReport& report) {
  if (best.converged || !std::isfinite(best.value)) return;
  auto options = options_from(config);
  options.initial_step = 0.1;
  auto result = nelder_mead(objective, best.x, options);
  report.evaluations += result.evaluations;
  if (result.value <= best.value) best = std::move(result);
}

// Draws depend only on (seed, sims); keep the last set around across objective calls.
const StableMixturePmf& fallback_pmf(const McFallback& fallback) {
  thread_local std::optional<std::pair<std::uint64_t, std::int64_t>> key;
  thread_local std::optional<StableMixturePmf> cached;
  const auto wanted = std::make_pair(fallback.seed, fallback.sims);
  if (!cached || key != wanted) {
    cached.emplace(fallback.sims, RngStream(fallback.seed, 0));
    key = wanted;
  }
  return *cached;
}

}  // namespace

std::string_view to_string(EstimationMethod method) {
  switch (method) {
    case EstimationMethod::kMomSingle:
      return "mom-single";
    case EstimationMethod::kMomTwoThreshold:
      return "mom-two-threshold";
    case EstimationMethod::kMle:
      return "mle";
    case EstimationMethod::kPpRate:
      return "pp-rate";
  }
  return "unknown";
}

EstimationMethod parse_method(std::string_view name) {
  if (name == "mom" || name == "mom-single") return EstimationMethod::kMomSingle;
  if (name == "mom2t" || name == "mom-two-threshold") return EstimationMethod::kMomTwoThreshold;
  if (name == "mle") return EstimationMethod::kMle;
  if (name == "pp" || name == "pp-rate") return EstimationMethod::kPpRate;
  throw std::invalid_argument("unknown estimation method '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::domain_error("SolverConfig: max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw std::domain_error("SolverConfig: tolerance must be > 0");
  if (!(xtol > 0.0)) throw std::domain_error("SolverConfig: xtol must be > 0");
  if (fixed_beta && !(*fixed_beta > 0.0 && *fixed_beta <= 1.0)) {
    throw std::domain_error("SolverConfig: fixed beta must lie in (0, 1]");
  }
  for (const double b : beta_starts) {
    if (!(b > 0.0 && b <= 1.0)) throw std::domain_error("SolverConfig: beta starts must lie in (0, 1]");
  }
}

EstimateReport fit_pp(const CountObservation& obs) {
  if (!(obs.threshold > 0.0)) throw std::domain_error("fit_pp: threshold must be > 0");
  if (obs.count < 0) throw std::domain_error("fit_pp: count must be >= 0");
  EstimateReport report;
  report.method = EstimationMethod::kPpRate;
  report.poisson = true;
  report.lambda = static_cast<double>(obs.count) / obs.threshold;
  report.beta = 1.0;
  if (obs.count == 0) {
    report.converged = false;
    report.notes.emplace_back("zero count: rate estimate sits on the boundary 0");
  }
  return report;
}

EstimateReport fit_mom_single(const CountObservation& obs, const SolverConfig& config) {
  config.validate();
  if (obs.count < 1) throw std::domain_error("fit_mom_single: count must be >= 1");
  if (!(obs.threshold > 0.0)) throw std::domain_error("fit_mom_single: threshold must be > 0");
  const double n = static_cast<double>(obs.count);
  const double t = obs.threshold;

  EstimateReport report;
  report.method = EstimationMethod::kMomSingle;

  if (config.fixed_beta) {
    // One free parameter: the first moment equation alone determines lambda.
    const FppParams params(moment_matched_lambda(n, *config.fixed_beta, t), *config.fixed_beta);
    store_estimate(report, params);
    report.objective = mom_objective(params, n, t);
    report.notes.emplace_back("beta held fixed; lambda solves the first moment equation");
  } else {
    const ParameterMap map{std::nullopt};
    const auto objective = [&](const std::vector<double>& x) {
      const auto params = map(x);
      return params ? mom_objective(*params, n, t) : kInfinity;
    };
    const std::vector<double> starts =
        config.beta_starts.empty() ? std::vector<double>{0.3, 0.5, 0.8, 1.0} : config.beta_starts;
    std::optional<NelderMeadResult> best;
    for (const double beta0 : starts) {
      auto result = nelder_mead(objective, map.start(moment_matched_lambda(n, beta0, t), beta0),
                                options_from(config));
      report.evaluations += result.evaluations;
      if (!best || result.value < best->value) best = std::move(result);
    }
    polish(objective, config, *best, report);
    store_estimate(report, *map(best->x));
    report.objective = best->value;
    report.converged = best->converged;
    if (!best->converged) report.notes.emplace_back("simplex did not converge; best point reported");
  }

  MomDegeneracy degeneracy;
  degeneracy.coefficient_at_estimate = variance_coefficient(report.beta);
  degeneracy.required_coefficient = 1.0 - 1.0 / n;
  degeneracy.interior_solution_exists = false;
  report.degeneracy = degeneracy;
  report.notes.emplace_back(
      "moment system degenerate: beta B(beta,1/2)/2^(2beta-1) >= 1 > 1 - 1/n_t on (0,1], "
      "so the least-squares solution is pushed to beta = 1");
  return report;
}

EstimateReport fit_mom_two_threshold(std::int64_t n1, std::int64_t n2, double t1, double t2) {
  if (!(t1 > 0.0 && t1 < t2)) throw std::domain_error("fit_mom_two_threshold: need 0 < t1 < t2");
  if (n1 < 1 || n2 < 1) throw std::domain_error("fit_mom_two_threshold: counts must be >= 1");
  if (n1 > n2) throw std::domain_error("fit_mom_two_threshold: need n1 <= n2");
  if (n1 == n2) {
    throw std::domain_error("fit_mom_two_threshold: n1 == n2 implies beta = 0, outside (0, 1]");
  }
  EstimateReport report;
  report.method = EstimationMethod::kMomTwoThreshold;
  const double raw_beta = std::log(static_cast<double>(n1) / static_cast<double>(n2)) /
                          std::log(t1 / t2);
  const double beta = std::min(raw_beta, 1.0);
  if (raw_beta > 1.0) report.notes.emplace_back("beta estimate clamped to 1");
  report.beta = beta;
  report.lambda = moment_matched_lambda(static_cast<double>(n1), beta, t1);
  return report;
}

LogLikelihood log_likelihood(const FppParams& params, std::span<const std::int64_t> counts,
                             double t, Truncation truncation, const McFallback& fallback) {
  if (counts.empty()) throw std::domain_error("log_likelihood: no observations");
  const auto multiplicity = tally(counts);
  PmfSeries series(params, t, truncation);

  LogLikelihood out;
  std::vector<std::int64_t> unreliable;
  std::vector<std::int64_t> weights;
  for (const auto& [n, times] : multiplicity) {
    const PmfValue pmf = series(n);
    if (!pmf.reliable) {
      unreliable.push_back(n);
      weights.push_back(times);
      continue;
    }
    if (!(pmf.value > 0.0)) {
      out.value = -kInfinity;
      return out;
    }
    out.value += static_cast<double>(times) * std::log(pmf.value);
  }
  if (!unreliable.empty()) {
    out.approximate = true;
    const auto log_p = fallback_pmf(fallback).log_pmf(params, t, unreliable);
    for (std::size_t i = 0; i < log_p.size(); ++i) {
      out.value += static_cast<double>(weights[i]) * log_p[i];
    }
  }
  return out;
}

LogLikelihood log_likelihood(const FppParams& params, std::span<const CountObservation> counts,
                             Truncation truncation, const McFallback& fallback) {
  if (counts.empty()) throw std::domain_error("log_likelihood: no observations");
  const double t = counts.front().threshold;
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  for (const auto& obs : counts) {
    if (obs.threshold != t) throw std::domain_error("log_likelihood: thresholds must be equal");
    values.push_back(obs.count);
  }
  return log_likelihood(params, values, t, truncation, fallback);
}

EstimateReport fit_mle(std::span<const std::int64_t> counts, double t, Truncation truncation,
                       const SolverConfig& config, const McFallback& fallback) {
  config.validate();
  if (counts.empty()) throw std::domain_error("fit_mle: need at least one observation");
  if (!(t > 0.0)) throw std::domain_error("fit_mle: t must be > 0");

  EstimateReport report;
  report.method = EstimationMethod::kMle;
  const ParameterMap map{config.fixed_beta};
  const auto objective = [&](const std::vector<double>& x) {
    const auto params = map(x);
    if (!params) return kInfinity;
    return -log_likelihood(*params, counts, t, truncation, fallback).value;
  };

  // Rate start: the Poisson rate n/t at beta = 1, moment-matched otherwise.
  const double mean_count = std::max(mean_of(counts), 0.5);
  std::vector<double> starts;
  if (config.fixed_beta) {
    starts = {*config.fixed_beta};
  } else {
    starts = config.beta_starts.empty() ? std::vector<double>{0.5, 0.8, 1.0} : config.beta_starts;
  }

  std::optional<NelderMeadResult> best;
  for (const double beta0 : starts) {
    auto result = nelder_mead(objective, map.start(moment_matched_lambda(mean_count, beta0, t), beta0),
                              options_from(config));
    report.evaluations += result.evaluations;
    if (!best || result.value < best->value) best = std::move(result);
  }
  polish(objective, config, *best, report);

  if (!std::isfinite(best->value)) {
    report.converged = false;
    report.objective = -kInfinity;
    report.notes.emplace_back("likelihood infeasible at every start");
    store_estimate(report, *map(map.start(moment_matched_lambda(mean_count, starts.front(), t),
                                          starts.front())));
    return report;
  }

  const FppParams estimate = *map(best->x);
  store_estimate(report, estimate);
  const LogLikelihood at_best = log_likelihood(estimate, counts, t, truncation, fallback);
  report.objective = at_best.value;
  report.approximate = at_best.approximate;
  report.converged = best->converged;
  if (!best->converged) report.notes.emplace_back("simplex did not converge; best point reported");
  if (best->x[0] < -kLogLambdaBound + 5.0) {
    report.converged = false;
    report.notes.emplace_back("lambda driven toward the 0 boundary");
  }
  if (!config.fixed_beta && estimate.beta() == 1.0) {
    report.notes.emplace_back("beta at the upper boundary 1");
  }
  if (report.approximate) report.notes.emplace_back("likelihood used the Monte Carlo pmf");

  if (report.converged) {
    const auto info = observed_information(estimate, counts, t, truncation, fallback);
    report.covariance = info.covariance;
    if (!info.positive_definite) report.notes.emplace_back("observed information not positive definite");
  }
  return report;
}

InformationMatrix observed_information(const FppParams& params,
                                       std::span<const std::int64_t> counts, double t,
                                       Truncation truncation, const McFallback& fallback) {
  const double lambda = params.lambda();
  const double beta = params.beta();
  const double h = std::min(std::max(1e-4, 1e-4 * lambda), 0.5 * lambda);
  const double k = std::max(1e-4, 1e-4 * beta);
  const auto f = [&](double l, double b) {
    return log_likelihood(FppParams(l, b), counts, t, truncation, fallback).value;
  };

  InformationMatrix out;
  out.one_sided_beta = beta + k > 1.0;
  const double f0 = f(lambda, beta);
  const double d_ll = (f(lambda + h, beta) - 2.0 * f0 + f(lambda - h, beta)) / (h * h);
  double d_bb = 0.0;
  double d_lb = 0.0;
  if (out.one_sided_beta) {
    d_bb = (f0 - 2.0 * f(lambda, beta - k) + f(lambda, beta - 2.0 * k)) / (k * k);
    d_lb = ((f(lambda + h, beta) - f(lambda + h, beta - k)) -
            (f(lambda - h, beta) - f(lambda - h, beta - k))) /
           (2.0 * h * k);
  } else {
    d_bb = (f(lambda, beta + k) - 2.0 * f0 + f(lambda, beta - k)) / (k * k);
    d_lb = (f(lambda + h, beta + k) - f(lambda + h, beta - k) - f(lambda - h, beta + k) +
            f(lambda - h, beta - k)) /
           (4.0 * h * k);
  }
  out.information = {{{-d_ll, -d_lb}, {-d_lb, -d_bb}}};

  const auto& info = out.information;
  const double det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
  out.positive_definite = std::isfinite(det) && info[0][0] > 0.0 && det > 0.0;
  if (out.positive_definite) {
    out.covariance = Matrix2{{{info[1][1] / det, -info[0][1] / det},
                              {-info[1][0] / det, info[0][0] / det}}};
  }
  return out;
}

StudyReport estimator_study(const StudyConfig& config) {
  if (config.paths < 1 || config.replicates < 1) {
    throw std::domain_error("estimator_study: paths and replicates must be >= 1");
  }
  const FppParams truth(config.lambda, config.beta);
  const bool sampled = config.method == EstimationMethod::kMle;
  if (sampled && (config.sample_size < 1 || config.sample_size > config.paths)) {
    throw std::domain_error("estimator_study: sample size must lie in [1, paths]");
  }
  const double t1 = config.t1.value_or(0.5 * config.t);
  if (config.method == EstimationMethod::kMomTwoThreshold && !(t1 > 0.0 && t1 < config.t)) {
    throw std::domain_error("estimator_study: need 0 < t1 < t");
  }

  // Path i is simulated from stream (seed, i) regardless of method.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(config.paths));
  std::vector<std::int64_t> early_counts(counts.size());
  for (int i = 0; i < config.paths; ++i) {
    RngStream stream(config.seed, static_cast<std::uint64_t>(i));
    const ArrivalPath path = simulate_path(truth, config.t, stream);
    counts[static_cast<std::size_t>(i)] = count_at(path, config.t).count;
    early_counts[static_cast<std::size_t>(i)] = count_at(path, t1).count;
  }

  StudyReport report;
  report.config = config;
  const std::uint64_t selection_seed = derive_seed(config.seed, kSelectionTag);
  const std::uint64_t fallback_seed = derive_seed(config.seed, kFallbackTag);
  std::vector<std::size_t> indices(counts.size());

  // Moment and rate fits use each path once; MLE replicates resample paths.
  const int fits = sampled ? config.replicates : config.paths;
  for (int r = 0; r < fits; ++r) {
    const auto index = static_cast<std::size_t>(r);
    std::optional<EstimateReport> fit;
    try {
      switch (config.method) {
        case EstimationMethod::kPpRate:
          fit = fit_pp({counts[index], config.t});
          break;
        case EstimationMethod::kMomSingle:
          fit = fit_mom_single({counts[index], config.t}, config.solver);
          break;
        case EstimationMethod::kMomTwoThreshold:
          fit = fit_mom_two_threshold(early_counts[index], counts[index], t1, config.t);
          break;
        case EstimationMethod::kMle: {
          RngStream selector(selection_seed, static_cast<std::uint64_t>(r));
          std::iota(indices.begin(), indices.end(), 0);
          std::vector<std::int64_t> sample;
          for (int s = 0; s < config.sample_size; ++s) {
            const auto pick = static_cast<std::size_t>(s) +
                              selector.uniform_index(indices.size() - static_cast<std::size_t>(s));
            std::swap(indices[static_cast<std::size_t>(s)], indices[pick]);
            sample.push_back(counts[indices[static_cast<std::size_t>(s)]]);
          }
          McFallback fallback{derive_seed(fallback_seed, static_cast<std::uint64_t>(r)),
                              config.mc_sims};
          fit = fit_mle(sample, config.t, config.truncation, config.solver, fallback);
          break;
        }
      }
    } catch (const std::domain_error&) {
      fit.reset();
    }
    if (!fit || !fit->converged) {
      report.excluded.push_back(r);
      continue;
    }
    if (fit->approximate) ++report.approximate_count;
    report.lambda_estimates.push_back(fit->lambda);
    report.beta_estimates.push_back(fit->beta);
  }

  report.replicates = static_cast<int>(report.lambda_estimates.size());
  if (report.replicates > 0) {
    report.lambda = summarize(report.lambda_estimates, config.lambda);
    report.beta = summarize(report.beta_estimates, config.beta);
  }
  return report;
}

ErrorMetrics error_metrics(std::span<const double> estimates, std::span<const double> truth) {
  if (estimates.size() != truth.size()) {
    throw std::domain_error("error_metrics: length mismatch");
  }
  if (estimates.empty()) throw std::domain_error("error_metrics: empty input");
  ErrorMetrics out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double diff = estimates[i] - truth[i];
    out.bias += diff;
    out.mse += diff * diff;
    out.mad += std::fabs(diff);
  }
  const double n = static_cast<double>(estimates.size());
  out.bias /= n;
  out.mse /= n;
  out.mad /= n;
  return out;
}

ParameterSummary summarize(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::domain_error("summarize: empty input");
  const std::vector<double> repeated(estimates.size(), truth);
  const ErrorMetrics metrics = error_metrics(estimates, repeated);
  ParameterSummary out;
  out.bias = metrics.bias;
  out.mse = metrics.mse;
  out.mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) /
             static_cast<double>(estimates.size());
  return out;
}

}  // namespace fpp
