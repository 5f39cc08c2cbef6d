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

// Monte-Carlo trials over the estimators. Trial i always uses seed
// base_seed + i and results are reduced in trial order, so every statistic is
// bit-identical for any worker count.

#ifndef NOISYSUM_EXPERIMENTS_HPP
#define NOISYSUM_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisysum/estimators.hpp"
#include "noisysum/model.hpp"
#include "noisysum/moment_matched.hpp"

namespace noisysum {

enum class ErrorFunctional {
  /// |mu_hat - mu| <= abs_budget.
  kAbsVsMu,
  /// eps1 (1 + gamma) E_{X~P} |x_X / P(X) - mu| + eps2.
  kThm21,
  /// eps (mu + sqrt(mu N)).
  kCorollary,
};

std::string to_string(ErrorFunctional f);
ErrorFunctional parse_error_functional(const std::string& name);

struct TrialConfig {
  Population population;
  PerturbedPair pair;
  /// With plan.t == 0 each trial runs the single-stage estimator centered at
  /// fixed_w; otherwise the two-stage estimator.
  PlanParameters plan;
  double fixed_w = 0.0;
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 0;
  ErrorFunctional functional = ErrorFunctional::kAbsVsMu;
  double abs_budget = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps = 0.0;
  unsigned threads = 1;
};

struct TrialStats {
  double mu = 0.0;
  double empirical_mean = 0.0;
  /// Unbiased sample variance; 0 for a single trial.
  double empirical_variance = 0.0;
  double success_rate = 0.0;
  double budget = 0.0;
  /// Quantiles of |mu_hat - mu| (linear interpolation between order statistics).
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  std::uint64_t samples_per_trial = 0;
  std::uint64_t trials = 0;
};

/// Error budget of a configuration under its functional.
double error_budget(const TrialConfig& config);

/// One estimate per trial, in trial order.
std::vector<double> run_estimates(const TrialConfig& config);

TrialStats run_trials(const TrialConfig& config);

/// Summary statistics of finished estimates against the true sum.
TrialStats summarize(std::span<const double> estimates, double mu, double budget);

struct BiasDecayRow {
  unsigned k = 0;
  double exact_bias = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

/// Per k in [k_min, k_max]: |E[estimate] - mu| at W = 0 from the closed form,
/// against gamma^k mu_plus.
std::vector<BiasDecayRow> bias_decay_sweep(const Population& pop, const PerturbedPair& pair,
                                           unsigned k_min, unsigned k_max);

/// Same, on the worst-case pair for `gamma`. When no split is given one
/// carrying exactly half the nominal mass is searched for.
std::vector<BiasDecayRow> bias_decay_sweep(const Population& pop, const Distribution& nominal,
                                           double gamma, unsigned k_min, unsigned k_max,
                                           std::optional<std::vector<std::size_t>> split = {});

/// Indices carrying exactly half of the nominal mass, if such a set exists
/// and can be found (uniform with even N, or N <= 20 by enumeration).
std::optional<std::vector<std::size_t>> find_balanced_split(const Distribution& nominal);

/// x_i = sign(gamma_i)^k: the population on which the order-k bias equals
/// gamma^k mu_plus when every |gamma_i| = gamma.
Population saturating_population(const PerturbedPair& pair, unsigned k);

struct ZeroOneResult {
  TrialStats stats;
  PlanParameters plan;
  std::uint64_t n = 0;
  std::uint64_t ones = 0;
};

/// 0/1 values with ceil(fraction_ones n) leading ones, uniform P over an even
/// n, deviations +gamma on the first half and -gamma on the second.
/// k = ceil(lg eps / lg gamma), m = ceil(c_m n^{1-1/k} eps^{-2/k}); the pilot
/// uses eps2 = eps sqrt(mu n) with the exact Hansen-Hurwitz variance.
/// Success is measured against eps (mu + sqrt(mu n)).
ZeroOneResult zero_one_experiment(std::uint64_t n, double fraction_ones, double gamma, double eps,
                                  std::uint64_t trials, double c_m, double c_t,
                                  std::uint64_t seed, unsigned threads = 1);

struct DistinguishConfig {
  std::vector<std::uint64_t> m_values;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  /// Estimator order; 0 means one more than the number of matched moments.
  unsigned order = 0;
  Scenario arm_a = Scenario::kO1;
  Scenario arm_b = Scenario::kO2;
  unsigned threads = 1;
};

struct DistinguishRow {
  std::uint64_t m = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  /// |mean_a - mean_b| / sqrt(var_a / T + var_b / T).
  double separation_z = 0.0;
};

/// Runs the two-stage estimator (t = m) on the reduction instance of each
/// arm. Arm b uses seeds offset by T so that identical arms stay independent.
std::vector<DistinguishRow> distinguishability_experiment(const RealizedPair& pair,
                                                          const DistinguishConfig& config);

}  // namespace noisysum

#endif  // NOISYSUM_EXPERIMENTS_HPP
