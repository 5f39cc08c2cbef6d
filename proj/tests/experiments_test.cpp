// Copyright 2026 The noisysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noisysum/experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "noisysum/estimators.hpp"
#include "noisysum/model.hpp"
#include "noisysum/moment_matched.hpp"

namespace noisysum {
namespace {

PerturbedPair two_point_pair(double gamma) {
  return make_perturbed(Distribution::uniform(2), {gamma, -gamma}, gamma);
}

TEST(ErrorFunctionalTest, RoundTripsNames) {
  for (auto f : {ErrorFunctional::kAbsVsMu, ErrorFunctional::kThm21, ErrorFunctional::kCorollary}) {
    EXPECT_EQ(parse_error_functional(to_string(f)), f);
  }
  EXPECT_THROW(parse_error_functional("median"), std::invalid_argument);
}

TEST(ErrorFunctionalTest, Budgets) {
  TrialConfig c{Population({1.0, 0.0}), two_point_pair(0.5), {}};
  c.functional = ErrorFunctional::kAbsVsMu;
  c.abs_budget = 0.7;
  EXPECT_EQ(error_budget(c), 0.7);
  c.functional = ErrorFunctional::kThm21;
  c.eps1 = 0.1;
  c.eps2 = 0.2;
  // E_P |x/P - mu| = 0.5 * 1 + 0.5 * 1 = 1 = sum |x_i - P(i) mu|.
  EXPECT_DOUBLE_EQ(error_budget(c), 0.1 * 1.5 * 1.0 + 0.2);
  c.functional = ErrorFunctional::kCorollary;
  c.eps = 0.25;
  EXPECT_DOUBLE_EQ(error_budget(c), 0.25 * (1.0 + std::sqrt(2.0)));
}

TEST(RunTrialsTest, ZeroVarianceInstanceAlwaysSucceeds) {
  const Population pop(std::vector<double>(6, 2.0));
  const Distribution p = Distribution::uniform(6);
  TrialConfig c{pop, make_perturbed(p, std::vector<double>(6, 0.0), 0.0), {}};
  c.plan.k = 1;
  c.plan.m = 10;
  c.plan.t = 0;
  c.trials = 50;
  c.abs_budget = 1e-9;
  const auto stats = run_trials(c);
  EXPECT_EQ(stats.success_rate, 1.0);
  EXPECT_NEAR(stats.empirical_mean, 12.0, 1e-12);
  EXPECT_NEAR(stats.empirical_variance, 0.0, 1e-20);
  EXPECT_EQ(stats.samples_per_trial, 10u);
}

TEST(RunTrialsTest, FixedCenterMeanMatchesClosedForm) {
  TrialConfig c{Population({1.0, 1.0}), two_point_pair(0.5), {}};
  c.plan.k = 2;
  c.plan.m = 50;
  c.plan.t = 0;
  c.fixed_w = 0.0;
  c.trials = 100'000;
  c.base_seed = 31;
  c.threads = 4;
  const auto stats = run_trials(c);
  EXPECT_LE(std::abs(stats.empirical_mean - 1.5),
            4.0 * std::sqrt(stats.empirical_variance / c.trials));
}

TEST(RunTrialsTest, UnbiasedAtScale) {
  const Population pop({3.0, 0.0, -1.0, 2.0, 5.0});
  const Distribution p({0.3, 0.1, 0.2, 0.25, 0.15});
  TrialConfig c{pop, make_perturbed(p, std::vector<double>(5, 0.0), 0.0), {}};
  c.plan.k = 1;
  c.plan.m = 20;
  c.plan.t = 0;
  c.trials = 100'000;
  c.threads = 4;
  const auto stats = run_trials(c);
  const double var_hh = population_stats(pop, p).var_hh;
  EXPECT_LE(std::abs(stats.empirical_mean - pop.sum()), 5.0 * std::sqrt(var_hh / (20.0 * c.trials)));
}

TEST(RunTrialsTest, SingleTrialQuantiles) {
  TrialConfig c{Population({1.0, 0.0}), two_point_pair(0.3), {}};
  c.plan.k = 1;
  c.plan.m = 3;
  c.plan.t = 0;
  c.trials = 1;
  const auto stats = run_trials(c);
  EXPECT_EQ(stats.q50, stats.q90);
  EXPECT_EQ(stats.q90, stats.q99);
  EXPECT_EQ(stats.q50, std::abs(stats.empirical_mean - 1.0));
  EXPECT_EQ(stats.empirical_variance, 0.0);
}

TEST(RunTrialsTest, ThreadCountInvariant) {
  TrialConfig c{Population({1.0, 4.0}), two_point_pair(0.4), {}};
  c.plan.k = 2;
  c.plan.m = 30;
  c.plan.t = 7;
  c.trials = 500;
  c.base_seed = 100;
  c.threads = 1;
  const auto a = run_estimates(c);
  c.threads = 8;
  const auto b = run_estimates(c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(run_trials(c).samples_per_trial, 37u);
}

TEST(RunTrialsTest, Errors) {
  TrialConfig c{Population({1.0, 4.0}), two_point_pair(0.4), {}};
  c.plan.k = 3;
  c.plan.m = 2;
  EXPECT_THROW(run_trials(c), std::invalid_argument);
  c.plan.k = 1;
  c.trials = 0;
  EXPECT_THROW(run_trials(c), std::invalid_argument);
}

TEST(SummarizeTest, TypeSevenQuantiles) {
  const std::vector<double> est = {1.0, 2.0, 3.0, 4.0, 5.0};
  const auto s = summarize(est, 0.0, 3.0);
  EXPECT_DOUBLE_EQ(s.empirical_mean, 3.0);
  EXPECT_DOUBLE_EQ(s.empirical_variance, 2.5);
  EXPECT_DOUBLE_EQ(s.q50, 3.0);
  EXPECT_DOUBLE_EQ(s.q90, 4.6);
  EXPECT_DOUBLE_EQ(s.success_rate, 0.6);
}

TEST(BiasDecayTest, SaturatingInstanceHitsBound) {
  const std::vector<std::size_t> split = {0};
  const auto pair = worst_case_pair(Distribution::uniform(2), 0.5, split);
  for (unsigned k = 1; k <= 6; ++k) {
    const auto row = bias_decay_sweep(saturating_population(pair, k), pair, k, k).front();
    EXPECT_NEAR(row.exact_bias, 2.0 * std::pow(0.5, k), 1e-12);
    EXPECT_NEAR(row.ratio, 1.0, 1e-12);
  }
}

TEST(BiasDecayTest, EvenOrdersSaturateOnOnes) {
  const auto rows = bias_decay_sweep(Population({1.0, 1.0}), Distribution::uniform(2), 0.5, 1, 6);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_LE(row.ratio, 1.0 + 1e-9);
    if (row.k % 2 == 0) EXPECT_NEAR(row.ratio, 1.0, 1e-12);
  }
}

TEST(BiasDecayTest, NoNoiseNoBias) {
  const auto rows = bias_decay_sweep(Population({1.0, -2.0, 3.0, 0.5}), Distribution::uniform(4), 0.0, 1, 5);
  for (const auto& row : rows) EXPECT_EQ(row.exact_bias, 0.0);
}

TEST(BiasDecayTest, MixedSignsCanCancel) {
  const auto rows = bias_decay_sweep(Population({1.0, -1.0}), Distribution::uniform(2), 0.5, 2, 2);
  EXPECT_LT(rows.front().ratio, 1.0);
}

TEST(BalancedSplitTest, FindsOrRejects) {
  EXPECT_EQ(find_balanced_split(Distribution::uniform(4)), (std::vector<std::size_t>{0, 1}));
  EXPECT_FALSE(find_balanced_split(Distribution::uniform(3)).has_value());
  EXPECT_TRUE(find_balanced_split(Distribution({0.1, 0.4, 0.3, 0.2})).has_value());
  EXPECT_FALSE(find_balanced_split(Distribution({0.6, 0.2, 0.2})).has_value());
}

TEST(ZeroOneTest, PlanFollowsCorollaryExponents) {
  const auto r = zero_one_experiment(10'000, 0.5, 0.5, 0.25, 50, 4.0, 16.0, 1);
  EXPECT_EQ(r.plan.k, 2u);
  EXPECT_EQ(r.plan.m, 1600u);
  EXPECT_EQ(r.ones, 5000u);
  EXPECT_EQ(r.stats.trials, 50u);

  const auto flat = zero_one_experiment(100, 0.5, 0.5, 0.5, 10, 4.0, 16.0, 1);
  EXPECT_EQ(flat.plan.k, 1u);
  EXPECT_EQ(flat.plan.m, 16u);
  const auto flat_big = zero_one_experiment(10'000, 0.5, 0.5, 0.5, 10, 4.0, 16.0, 1);
  EXPECT_EQ(flat_big.plan.m, 16u);
}

TEST(ZeroOneTest, AllZerosAlwaysSucceeds) {
  const auto r = zero_one_experiment(100, 0.0, 0.5, 0.25, 40, 4.0, 16.0, 3);
  EXPECT_EQ(r.stats.success_rate, 1.0);
  EXPECT_EQ(r.stats.empirical_mean, 0.0);
}

TEST(ZeroOneTest, Errors) {
  EXPECT_THROW(zero_one_experiment(100, 0.5, 0.5, 0.6, 10, 4, 16, 1), std::invalid_argument);
  EXPECT_THROW(zero_one_experiment(101, 0.5, 0.5, 0.25, 10, 4, 16, 1), std::invalid_argument);
}

TEST(DistinguishTest, SeparationGrowsAndNullStaysCalibrated) {
  const auto pair = realize_integer_counts(construct_pair(1, Rational(1, 2), 300));
  DistinguishConfig config;
  config.m_values = {4, 16, 64, 256};
  config.trials = 500;
  config.seed = 9;
  const auto rows = distinguishability_experiment(pair, config);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_GT(rows.back().separation_z, 10.0);
  EXPECT_LT(rows.front().separation_z, rows.back().separation_z);

  config.arm_b = config.arm_a;
  for (const auto& row : distinguishability_experiment(pair, config)) {
    EXPECT_LT(row.separation_z, 4.0);
  }
}

TEST(DistinguishTest, NeedsThirtyTrials) {
  const auto pair = realize_integer_counts(construct_pair(1, Rational(1, 2), 30));
  DistinguishConfig config;
  config.m_values = {4};
  config.trials = 1;
  EXPECT_THROW(distinguishability_experiment(pair, config), std::invalid_argument);
  config.trials = 30;
  config.m_values.clear();
  EXPECT_THROW(distinguishability_experiment(pair, config), std::invalid_argument);
}

}  // namespace
}  // namespace noisysum
