#include "hscore/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hscore/sampling.hpp"

namespace hscore {
namespace {

FrequencyTable table(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> rows) {
  FrequencyTable freq;
  for (auto [value, count] : rows) freq.add(value, count);
  return freq;
}

// Brute-force argmin of the empirical score on a uniform grid.
double grid_argmin(const FrequencyTable& freq, const RuleParams& rule, double hi, double step) {
  double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
  const auto points = static_cast<long>(std::llround(hi / step));
  for (long i = 0; i <= points; ++i) {
    const double theta = i * step;
    const double value = poisson_empirical_score(theta, freq, rule);
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  }
  return best_theta;
}

TEST(EmpiricalScoreTest, Examples) {
  const RuleParams rule(2, 2);
  const auto freq = table({{0, 1}, {1, 2}, {2, 1}});
  EXPECT_EQ(poisson_empirical_score(0.0, freq, rule), 0.0);
  EXPECT_EQ(poisson_empirical_score(0.0, table({{3, 4}, {9, 1}}), RuleParams(3, 1.5)), 0.0);
  EXPECT_DOUBLE_EQ(poisson_empirical_score(1.0, freq, rule), -2.0);
  EXPECT_DOUBLE_EQ(poisson_empirical_score(2.0, table({{0, 1}}), rule), 2.0);
  EXPECT_THROW(poisson_empirical_score(-1.0, freq, rule), std::invalid_argument);
  EXPECT_THROW(poisson_empirical_score(1.0, FrequencyTable{}, rule), std::invalid_argument);
}

TEST(EmpiricalScoreTest, AgreesWithGeneralTotalScore) {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<std::uint64_t> value(0, 20);
  for (auto rule : {RuleParams(2, 2), RuleParams(2, 1.5), RuleParams(1, 0.5)}) {
    for (int trial = 0; trial < 50; ++trial) {
      FrequencyTable freq;
      for (int i = 0; i < 15; ++i) freq.add(value(gen));
      for (double theta : {0.3, 2.0, 7.5}) {
        auto ratio = [theta](std::uint64_t y) { return theta / (static_cast<double>(y) + 1.0); };
        const double expected = empirical_total_score(freq, ratio, rule);
        EXPECT_NEAR(poisson_empirical_score(theta, freq, rule), expected,
                    1e-12 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST(GoldenSectionTest, FindsInteriorAndBoundaryMinima) {
  const auto interior =
      golden_section_minimize([](double x) { return (x - 1.3) * (x - 1.3); }, 0, 5);
  EXPECT_NEAR(interior.x, 1.3, 1e-8);
  const auto boundary = golden_section_minimize([](double x) { return x; }, 0, 5);
  EXPECT_EQ(boundary.x, 0.0);
  EXPECT_THROW(golden_section_minimize([](double x) { return x; }, 2, 1), std::invalid_argument);
}

TEST(FitMinScoreTest, Examples) {
  const auto freq = table({{0, 1}, {1, 2}, {2, 1}});
  const auto fit = fit_min_score(freq, RuleParams(2, 2));
  EXPECT_EQ(fit.theta_hat, 1.0);
  EXPECT_EQ(fit.method, FitMethod::ClosedForm);
  EXPECT_NEAR(fit.theta_hat, grid_argmin(freq, RuleParams(2, 2), 5.0, 1e-4), 1e-4);
  EXPECT_DOUBLE_EQ(fit.achieved_score, poisson_empirical_score(1.0, freq, RuleParams(2, 2)));

  EXPECT_EQ(fit_min_score(table({{0, 5}}), RuleParams(2, 2)).theta_hat, 0.0);
  EXPECT_THROW(fit_min_score(FrequencyTable{}, RuleParams(2, 2)), std::invalid_argument);
}

TEST(FitMinScoreTest, GeneralRuleMatchesGridOracle) {
  // Grid over [0, 5] at 1e-4 puts the argmin at 0.8683; the stationary point
  // sum f_x x^{a-m+1} / sum f_y (y+1)^{a-m} = (2 + 2^1.5) / (1 + 2^1.5 + 3^0.5)
  // is 0.868347.
  const auto freq = table({{0, 1}, {1, 2}, {2, 1}});
  const RuleParams rule(2, 1.5);
  const double oracle = grid_argmin(freq, rule, 5.0, 1e-4);
  EXPECT_NEAR(oracle, 0.8683, 1e-9);
  const auto fit = fit_min_score(freq, rule);
  EXPECT_EQ(fit.method, FitMethod::BracketSearch);
  EXPECT_NEAR(fit.theta_hat, oracle, 1e-4);
  EXPECT_NEAR(fit.theta_hat, (2 + std::pow(2, 1.5)) / (1 + std::pow(2, 1.5) + std::sqrt(3.0)),
              1e-7);
  EXPECT_GT(fit.iterations, 0);
}

TEST(FitMinScoreTest, ClosedFormIsSampleMean) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    FrequencyTable freq;
    const int n = 1 + static_cast<int>(rng.next_u64() % 200);
    for (int i = 0; i < n; ++i) freq.add(sample_poisson(0.5 + trial * 0.2, rng));
    EXPECT_NEAR(fit_min_score(freq, RuleParams(2, 2)).theta_hat, freq.mean(), 1e-12);
  }
}

TEST(FitMinScoreTest, BracketSearchBeatsEveryGridPoint) {
  Rng rng(78);
  for (auto rule : {RuleParams(2, 1.5), RuleParams(3, 2), RuleParams(1, 0.5), RuleParams(0, 3)}) {
    for (int trial = 0; trial < 10; ++trial) {
      FrequencyTable freq;
      for (int i = 0; i < 40; ++i) freq.add(sample_negbin(5.0, 0.4, rng));
      const auto fit = fit_min_score(freq, rule);
      const double theta_max = std::max(10.0 * freq.mean(), 1.0);
      for (double theta = 0.0; theta <= theta_max; theta += 1e-3) {
        const double value = poisson_empirical_score(theta, freq, rule);
        EXPECT_LE(fit.achieved_score, value + 1e-12 * std::abs(value))
            << "a=" << rule.a() << " m=" << rule.m() << " theta=" << theta;
      }
    }
  }
}

TEST(FitMinScoreTest, AllZeroDataSitsAtBoundary) {
  for (auto rule : {RuleParams(2, 2), RuleParams(2, 1.5), RuleParams(1, 0.5)}) {
    const auto fit = fit_min_score(table({{0, 12}}), rule);
    EXPECT_EQ(fit.theta_hat, 0.0);
  }
}

TEST(FitMinScoreTest, ThetaMaxOverride) {
  const auto freq = table({{4, 3}, {6, 1}});
  FitOptions options;
  options.theta_max = 2.0;
  const auto fit = fit_min_score(freq, RuleParams(2, 1.5), options);
  EXPECT_LE(fit.theta_hat, 2.0);
  options.theta_max = -1.0;
  EXPECT_THROW(fit_min_score(freq, RuleParams(2, 1.5), options), std::invalid_argument);
}

}  // namespace
}  // namespace hscore
