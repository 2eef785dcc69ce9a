#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fpp/process.hpp"
#include "fpp/special_functions.hpp"

using namespace fpp;

TEST(Params, Validation) {
  EXPECT_THROW(FppParams(0.0, 0.5), std::domain_error);
  EXPECT_THROW(FppParams(1.0, 0.0), std::domain_error);
  EXPECT_THROW(FppParams(1.0, 1.01), std::domain_error);
  EXPECT_THROW(PoissonParams(-1.0), std::domain_error);
  EXPECT_NO_THROW(FppParams(1.0, 1.0));
  EXPECT_NEAR(FppParams(2.0, 0.8).q(), 2.0 / std::tgamma(1.8), 1e-14);
}

TEST(Kanter, ExponentialBranch) {
  EXPECT_NEAR(kanter_waiting_time(FppParams(2.0, 1.0), 0.5, 0.3, 0.7), std::log(2.0) / 2.0, 1e-15);
}

TEST(Kanter, LambdaIsAPureScale) {
  const double u[][3] = {{0.1, 0.2, 0.3}, {0.9, 0.5, 0.01}, {0.37, 0.999, 0.42}};
  for (const double beta : {0.3, 0.8, 0.95}) {
    for (const auto& uu : u) {
      const double base = kanter_waiting_time(FppParams(1.0, beta), uu[0], uu[1], uu[2]);
      const double lambda = 3.7;
      EXPECT_EQ(kanter_waiting_time(FppParams(lambda, beta), uu[0], uu[1], uu[2]),
                std::pow(lambda, -1.0 / beta) * base);
    }
  }
}

TEST(Kanter, SurvivalMatchesMittagLeffler) {
  const FppParams params(1.0, 0.8);
  RngStream rng(2024, 0);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = sample_interarrival(params, rng);
  std::sort(draws.begin(), draws.end());
  double sup = 0.0;
  for (const double tau : {0.01, 0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    const auto above = draws.end() - std::upper_bound(draws.begin(), draws.end(), tau);
    const double empirical = static_cast<double>(above) / static_cast<double>(draws.size());
    sup = std::max(sup, std::fabs(empirical - mittag_leffler(0.8, -std::pow(tau, 0.8))));
  }
  EXPECT_LT(sup, 0.01);
}

TEST(SimulatePath, TinyHorizonIsUsuallyEmpty) {
  int empty = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(s, 0);
    empty += simulate_path(PoissonParams(1.0), 1e-4, rng).empty() ? 1 : 0;
  }
  EXPECT_GE(empty, 98);
}

TEST(SimulatePath, TimesSortedWithinHorizon) {
  RngStream rng(3, 1);
  const auto path = simulate_path(FppParams(2.0, 0.6), 50.0, rng);
  EXPECT_TRUE(std::is_sorted(path.times().begin(), path.times().end()));
  for (const double t : path.times()) {
    EXPECT_GT(t, 0.0);
    EXPECT_LE(t, 50.0);
  }
  EXPECT_THROW(simulate_path(PoissonParams(1.0), 0.0, rng), std::domain_error);
}

TEST(SimulatePath, MeanCountAtLargeHorizon) {
  const FppParams params(2.0, 0.8);
  const int sims = 20000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int s = 0; s < sims; ++s) {
    RngStream rng(77, static_cast<std::uint64_t>(s));
    const double n = static_cast<double>(simulate_path(params, 300.0, rng).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / sims;
  const double se = std::sqrt((sum2 / sims - mean * mean) / sims);
  EXPECT_NEAR(fpp_mean(params, 300.0), 205.9, 0.05);
  EXPECT_NEAR(mean, fpp_mean(params, 300.0), 3.0 * se);
}

TEST(CountAt, OriginExcludedAndBoundaryInclusive) {
  const ArrivalPath path({0.0, 3.0, 17.0}, 17.0);
  EXPECT_EQ(count_at(path, 10.0).count, 1);
  EXPECT_EQ(count_at(path, 17.0).count, 2);
  EXPECT_EQ(count_at(ArrivalPath({}, 5.0), 2.0).count, 0);
  EXPECT_THROW(count_at(path, 0.0), std::domain_error);
  EXPECT_THROW(count_at(path, 18.0), std::domain_error);
}

TEST(ArrivalPathType, RejectsBadTimes) {
  EXPECT_THROW(ArrivalPath({2.0, 1.0}, 5.0), std::domain_error);
  EXPECT_THROW(ArrivalPath({1.0, 6.0}, 5.0), std::domain_error);
  EXPECT_THROW(ArrivalPath({-1.0}, 5.0), std::domain_error);
  EXPECT_NO_THROW(ArrivalPath({0.0}, 0.0));
}

TEST(Pmf, PoissonReduction) {
  for (const double lt : {0.1, 1.0, 4.0, 10.0}) {
    for (int n = 0; n <= 30; ++n) {
      const auto p = fpp_pmf(FppParams(lt, 1.0), n, 1.0, Truncation::adaptive());
      EXPECT_NEAR(p.value, poisson_pmf(lt, n), 1e-12) << lt << " " << n;
    }
  }
}

TEST(Pmf, ZeroCountIsMittagLeffler) {
  for (const double beta : {0.6, 0.7, 0.9}) {
    const auto p = fpp_pmf(FppParams(1.0, beta), 0, 1.0);
    EXPECT_TRUE(p.reliable);
    EXPECT_NEAR(p.value, mittag_leffler(beta, -1.0), 1e-8);
  }
}

TEST(Pmf, MatchesHighPrecisionReference) {
  // 80-digit mpmath series at lambda = 1, beta = 0.8, t = 10.
  const std::pair<int, double> refs[] = {{0, 0.042979301317701540616}, {1, 0.052968770798407557859},
                                         {2, 0.063916643054458923985}, {5, 0.090576506845090369599},
                                         {10, 0.063911605952223963939}, {15, 0.014625339734138180988},
                                         {20, 0.001305012762786287269}};
  for (const auto& [n, value] : refs) {
    const auto p = fpp_pmf(FppParams(1.0, 0.8), n, 10.0, Truncation::adaptive());
    EXPECT_TRUE(p.reliable) << n;
    EXPECT_NEAR(p.value, value, 1e-4 * value) << n;
  }
  const auto p = fpp_pmf(FppParams(0.5, 0.6), 4, 2.0, Truncation::adaptive());
  EXPECT_NEAR(p.value, 0.019397702491766123489, 1e-12);
}

TEST(Pmf, Normalization) {
  for (const double beta : {0.6, 0.7, 0.9}) {
    double total = 0.0;
    for (int n = 0; n <= 50; ++n) total += fpp_pmf(FppParams(1.0, beta), n, 1.0).value;
    EXPECT_NEAR(total, 1.0, 1e-8) << beta;
  }
}

TEST(Pmf, ShortTruncationIsFlagged) {
  // Far too few terms for x = 10^0.8: the tail check must notice.
  const auto p = fpp_pmf(FppParams(1.0, 0.8), 5, 10.0, Truncation::fixed(5));
  EXPECT_FALSE(p.reliable);
}

TEST(Pmf, CancellationAtLargeHorizonIsFlagged) {
  const auto p = fpp_pmf(FppParams(2.0, 0.8), 200, 300.0);
  EXPECT_FALSE(p.reliable);
  EXPECT_THROW(Truncation::fixed(-1), std::domain_error);
}

TEST(PmfMc, AgreesWithSeriesAndPoisson) {
  const RngStream rng(11, 0);
  const auto mc = fpp_pmf_mc(FppParams(1.0, 0.7), 1, 1.0, 20000, rng);
  const double exact = fpp_pmf(FppParams(1.0, 0.7), 1, 1.0).value;
  EXPECT_NEAR(mc.estimate, exact, 3.0 * mc.std_error);
  const auto pois = fpp_pmf_mc(FppParams(2.0, 1.0), 2, 1.0, 20000, rng);
  EXPECT_NEAR(pois.estimate, poisson_pmf(2.0, 2), 3.0 * pois.std_error);
}

TEST(PmfMc, DegenerateWhenNeverHit) {
  const auto mc = fpp_pmf_mc(FppParams(1.0, 0.9), 500, 1.0, 1000, RngStream(1, 0));
  EXPECT_EQ(mc.estimate, 0.0);
  EXPECT_EQ(mc.std_error, 0.0);
  EXPECT_TRUE(mc.degenerate);
  EXPECT_THROW(fpp_pmf_mc(FppParams(1.0, 0.9), 1, 1.0, 999, RngStream(1, 0)), std::domain_error);
}

TEST(StableMixture, MatchesSeriesInReliableRegime) {
  const StableMixturePmf mixture(200000, RngStream(5, 0));
  const std::vector<std::int64_t> ns = {0, 3, 6, 10, 15};
  const auto log_p = mixture.log_pmf(FppParams(1.0, 0.8), 10.0, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double exact = fpp_pmf(FppParams(1.0, 0.8), ns[i], 10.0, Truncation::adaptive()).value;
    EXPECT_NEAR(std::exp(log_p[i]), exact, 0.02 * exact) << ns[i];
  }
}

TEST(StableMixture, ExactAtBetaOne) {
  const StableMixturePmf mixture(1000, RngStream(5, 0));
  const std::vector<std::int64_t> ns = {0, 4, 9};
  const auto log_p = mixture.log_pmf(FppParams(3.0, 1.0), 2.0, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    EXPECT_NEAR(std::exp(log_p[i]), poisson_pmf(6.0, ns[i]), 1e-13);
  }
}

TEST(StableMixture, MeanOfMixingRateIsFppMean) {
  // sum_n n p(n) over a wide range recovers q t^beta.
  const StableMixturePmf mixture(50000, RngStream(8, 0));
  std::vector<std::int64_t> ns(600);
  std::iota(ns.begin(), ns.end(), 0);
  const auto log_p = mixture.log_pmf(FppParams(2.0, 0.8), 30.0, ns);
  double mean = 0.0;
  for (std::size_t n = 0; n < ns.size(); ++n) mean += static_cast<double>(n) * std::exp(log_p[n]);
  EXPECT_NEAR(mean, fpp_mean(FppParams(2.0, 0.8), 30.0), 0.02 * mean);
}

TEST(Moments, PoissonReduction) {
  const FppParams p(1.7, 1.0);
  EXPECT_NEAR(fpp_mean(p, 3.0), 5.1, 1e-12);
  EXPECT_NEAR(fpp_variance(p, 3.0, VarianceForm::kBetaCoefficient), 5.1, 1e-12);
  EXPECT_NEAR(fpp_variance(p, 3.0, VarianceForm::kAlternative), 5.1, 1e-10);
}

TEST(Moments, VarianceFormsAgree) {
  for (const double lambda : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (const double beta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      for (const double t : {0.5, 1.0, 10.0, 100.0, 300.0}) {
        const FppParams p(lambda, beta);
        const double a = fpp_variance(p, t, VarianceForm::kBetaCoefficient);
        const double b = fpp_variance(p, t, VarianceForm::kAlternative);
        EXPECT_NEAR(a, b, 1e-10 * std::fabs(a)) << lambda << " " << beta << " " << t;
      }
    }
  }
}

TEST(Moments, OverdispersedBelowOne) {
  const FppParams p(2.0, 0.8);
  EXPECT_GT(fpp_variance(p, 300.0), fpp_mean(p, 300.0));
}
