#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "fpp/gof.hpp"
#include "fpp/rng.hpp"

using namespace fpp;

namespace {

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<>(), x); }

std::vector<double> normal_draws(RngStream& rng, int n) {
  const boost::math::normal_distribution<> standard;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = boost::math::quantile(standard, rng.uniform_open());
  return out;
}

}  // namespace

TEST(Ecdf, StepValues) {
  const std::vector<double> s = {3.0, 1.0, 2.0};
  const auto F = ecdf(s);
  EXPECT_NEAR(F(2.0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(F(0.5), 0.0);
  EXPECT_EQ(F(3.0), 1.0);
  const std::vector<double> same = {4.0, 4.0, 4.0};
  EXPECT_EQ(ecdf(same)(4.0), 1.0);
  EXPECT_EQ(ecdf(same).steps().size(), 1u);
  EXPECT_THROW(ecdf(std::vector<double>{}), std::domain_error);
}

TEST(Ecdf, GlivenkoCantelli) {
  RngStream rng(4, 0);
  std::vector<double> u(100000);
  for (auto& v : u) v = rng.uniform_open();
  const auto F = ecdf(u);
  double sup = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    sup = std::max(sup, std::fabs(F(x) - x));
  }
  EXPECT_LT(sup, 0.01);
}

TEST(Kolmogorov, LimitsAndKnownValues) {
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_survival(1e-3), 1.0, 1e-12);
  EXPECT_LT(kolmogorov_survival(10.0), 1e-80);
  // Standard critical values.
  EXPECT_NEAR(kolmogorov_survival(1.3580986), 0.05, 1e-6);
  EXPECT_NEAR(kolmogorov_survival(1.6276236), 0.01, 1e-6);
  EXPECT_NEAR(kolmogorov_survival(1.2238478), 0.10, 1e-6);
  // Both branches meet smoothly.
  EXPECT_NEAR(kolmogorov_survival(1.18 - 1e-12), kolmogorov_survival(1.18), 1e-10);
  double previous = 1.0;
  for (double x = 0.01; x < 3.0; x += 0.01) {
    const double q = kolmogorov_survival(x);
    EXPECT_LE(q, previous + 1e-12);
    previous = q;
  }
}

TEST(KsTwoSample, IdenticalAndSeparated) {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  const std::vector<double> b = {10.0, 11.0};
  const auto apart = ks_two_sample(a, b);
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_NEAR(apart.n_eff, 8.0 / 6.0, 1e-15);
  EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), std::domain_error);
}

TEST(KsTwoSample, TiesStack) {
  const std::vector<double> a = {1.0, 1.0, 2.0};
  const std::vector<double> b = {1.0, 2.0, 2.0};
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 1.0 / 3.0, 1e-15);
}

TEST(KsTwoSample, InvariantUnderMonotoneTransform) {
  RngStream rng(8, 0);
  std::vector<double> a(200);
  std::vector<double> b(150);
  for (auto& v : a) v = rng.uniform_open();
  for (auto& v : b) v = rng.uniform_open() * 1.2;
  auto ta = a;
  auto tb = b;
  for (auto& v : ta) v = std::exp(3.0 * v);
  for (auto& v : tb) v = std::exp(3.0 * v);
  EXPECT_EQ(ks_two_sample(a, b).statistic, ks_two_sample(ta, tb).statistic);
}

TEST(KsTwoSample, NullExponentialSamples) {
  int accepted = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(1000, static_cast<std::uint64_t>(s));
    std::vector<double> a(500);
    std::vector<double> b(500);
    for (auto& v : a) v = -std::log(rng.uniform_open());
    for (auto& v : b) v = -std::log(rng.uniform_open());
    accepted += ks_two_sample(a, b).p_value > 0.05 ? 1 : 0;
  }
  EXPECT_GE(accepted, 95);
}

TEST(KsOneSample, QuantileSampleGivesHalfStep) {
  const int n = 40;
  std::vector<double> x;
  for (int k = 1; k <= n; ++k) x.push_back((k - 0.5) / n);
  const auto r = ks_one_sample(x, [](double v) { return v; });
  EXPECT_NEAR(r.statistic, 0.5 / n, 1e-15);
  EXPECT_EQ(r.n_eff, n);
  EXPECT_THROW(ks_one_sample(x, [](double) { return 1.5; }), std::domain_error);
}

TEST(KsOneSample, NullNormalSamples) {
  int accepted = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(2000, static_cast<std::uint64_t>(s));
    const auto x = normal_draws(rng, 1000);
    accepted += ks_one_sample(x, normal_cdf).p_value > 0.05 ? 1 : 0;
  }
  EXPECT_GE(accepted, 95);
}

TEST(QqNormal, NormalDataHugsDiagonal) {
  RngStream rng(6, 0);
  const auto x = normal_draws(rng, 10000);
  double worst = 0.0;
  for (const auto& p : qq_normal(x)) {
    if (std::fabs(p.theoretical) < 3.0) worst = std::max(worst, std::fabs(p.sample - p.theoretical));
  }
  EXPECT_LT(worst, 0.1);
}

TEST(QqNormal, SymmetryAndTwoPoints) {
  const std::vector<double> sym = {-3.0, -1.0, 0.0, 1.0, 3.0};
  const auto pts = qq_normal(sym);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(pts[i].sample, -pts[pts.size() - 1 - i].sample, 1e-9);
    EXPECT_NEAR(pts[i].theoretical, -pts[pts.size() - 1 - i].theoretical, 1e-9);
  }
  const std::vector<double> two = {-1.0, 1.0};
  const auto p2 = qq_normal(two);
  ASSERT_EQ(p2.size(), 2u);
  EXPECT_NEAR(p2[0].sample, -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p2[1].sample, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(qq_normal(std::vector<double>{2.0, 2.0}), std::domain_error);
  EXPECT_THROW(qq_normal(std::vector<double>{2.0}), std::domain_error);
}

TEST(NormalityTest, AcceptsNormalRejectsSkewed) {
  RngStream rng(12, 0);
  const auto x = normal_draws(rng, 500);
  EXPECT_GT(normality_test(x).p_value, 0.01);
  std::vector<double> skewed(500);
  for (auto& v : skewed) v = std::exp(3.0 * rng.uniform_open() * rng.uniform_open() * 4.0);
  EXPECT_LT(normality_test(skewed).p_value, 0.01);
}

TEST(ComparisonSample, InterArrivalFloorsAndDiffs) {
  const std::vector<double> times = {0.0, 3.0, 17.0, 17.0, 25.5, 30.0};
  const auto gaps = comparison_sample(times, 26.0, ComparisonMode::kInterArrival);
  EXPECT_EQ(gaps, (std::vector<double>{3.0, 14.0, 0.0, 8.0}));
  const auto kept = comparison_sample(times, 26.0, ComparisonMode::kEventTimes);
  EXPECT_EQ(kept, (std::vector<double>{3.0, 17.0, 17.0, 25.5}));
}

TEST(CompareToModel, DeterministicAndSeparatesModels) {
  RngStream rng(99, 0);
  const auto observed = simulate_path(FppParams(0.69, 0.8), 200.0, rng);
  ComparisonConfig config;
  config.tests = 20;
  config.seed = 4;
  const auto a = compare_to_model(observed.times(), 200.0, FppParams(0.69, 0.8), config);
  const auto b = compare_to_model(observed.times(), 200.0, FppParams(0.69, 0.8), config);
  ASSERT_EQ(a.results.size(), 20u);
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].p_value, b.results[i].p_value);
  }
  EXPECT_THROW(compare_to_model(std::vector<double>{0.0}, 200.0, PoissonParams(1.0), config),
               std::domain_error);
  config.paths_per_test = 0;
  EXPECT_THROW(compare_to_model(observed.times(), 200.0, PoissonParams(1.0), config),
               std::domain_error);
}
