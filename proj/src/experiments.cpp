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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noisysum/numeric.hpp"
#include "noisysum/parallel.hpp"

namespace noisysum {

std::string to_string(ErrorFunctional f) {
  switch (f) {
    case ErrorFunctional::kAbsVsMu:
      return "abs_vs_mu";
    case ErrorFunctional::kThm21:
      return "thm21";
    case ErrorFunctional::kCorollary:
      return "corollary";
  }
  return "unknown";
}

ErrorFunctional parse_error_functional(const std::string& name) {
  if (name == "abs_vs_mu") return ErrorFunctional::kAbsVsMu;
  if (name == "thm21") return ErrorFunctional::kThm21;
  if (name == "corollary") return ErrorFunctional::kCorollary;
  throw std::invalid_argument("unknown error functional '" + name + "'");
}

double error_budget(const TrialConfig& config) {
  const Population& pop = config.population;
  const Distribution& nominal = config.pair.nominal;
  const double mu = pop.sum();
  switch (config.functional) {
    case ErrorFunctional::kAbsVsMu:
      return config.abs_budget;
    case ErrorFunctional::kThm21: {
      CompensatedSum spread;
      for (std::size_t i = 0; i < pop.size(); ++i) spread.add(std::abs(pop[i] - nominal[i] * mu));
      return config.eps1 * (1.0 + config.pair.gamma_bound) * spread.value() + config.eps2;
    }
    case ErrorFunctional::kCorollary:
      return config.eps * (mu + std::sqrt(std::max(0.0, mu) * static_cast<double>(pop.size())));
  }
  return 0.0;
}

std::vector<double> run_estimates(const TrialConfig& config) {
  if (config.trials == 0) throw std::invalid_argument("trial count must be at least 1");
  if (config.population.size() != config.pair.size()) {
    throw std::invalid_argument("population and distribution pair differ in size");
  }
  const PlanParameters& plan = config.plan;
  if (plan.k == 0 || plan.k > plan.m || plan.k > kMaxOrder) {
    throw std::invalid_argument("plan needs 1 <= k <= min(m, 32)");
  }
  const AliasSampler sampler(config.pair.true_dist);
  std::vector<double> estimates(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t trial) {
    const std::uint64_t seed = config.base_seed + trial;
    if (plan.t > 0) {
      estimates[trial] =
          improved_estimate_sum(sampler, plan, config.population, config.pair.nominal, seed)
              .estimate;
      return;
    }
    Rng rng(seed);
    std::vector<std::size_t> indices(plan.m);
    sampler.fill(rng, indices);
    estimates[trial] = estimate_sum(frequency_vector(indices, config.population.size()), plan.k,
                                    config.fixed_w, config.population, config.pair.nominal)
                           .estimate;
  });
  return estimates;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

TrialStats summarize(std::span<const double> estimates, double mu, double budget) {
  if (estimates.empty()) throw std::invalid_argument("no estimates to summarize");
  TrialStats stats;
  stats.mu = mu;
  stats.budget = budget;
  stats.trials = estimates.size();
  CompensatedSum sum;
  for (double e : estimates) sum.add(e);
  const double n = static_cast<double>(estimates.size());
  stats.empirical_mean = sum.value() / n;
  if (estimates.size() > 1) {
    CompensatedSum sq;
    for (double e : estimates) {
      const double d = e - stats.empirical_mean;
      sq.add(d * d);
    }
    stats.empirical_variance = sq.value() / (n - 1.0);
  }
  std::vector<double> errors(estimates.size());
  std::uint64_t successes = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    errors[i] = std::abs(estimates[i] - mu);
    if (errors[i] <= budget) ++successes;
  }
  stats.success_rate = static_cast<double>(successes) / n;
  std::sort(errors.begin(), errors.end());
  stats.q50 = quantile_sorted(errors, 0.50);
  stats.q90 = quantile_sorted(errors, 0.90);
  stats.q99 = quantile_sorted(errors, 0.99);
  return stats;
}

TrialStats run_trials(const TrialConfig& config) {
  const auto estimates = run_estimates(config);
  auto stats = summarize(estimates, config.population.sum(), error_budget(config));
  stats.samples_per_trial = config.plan.t + config.plan.m;
  return stats;
}

std::vector<BiasDecayRow> bias_decay_sweep(const Population& pop, const PerturbedPair& pair,
                                           unsigned k_min, unsigned k_max) {
  if (k_min == 0 || k_min > k_max) throw std::invalid_argument("need 1 <= k_min <= k_max");
  const double mu = pop.sum();
  const double mu_plus = pop.positive_sum();
  std::vector<BiasDecayRow> rows;
  for (unsigned k = k_min; k <= k_max; ++k) {
    BiasDecayRow row;
    row.k = k;
    row.exact_bias = std::abs(closed_form_expectation(pop, pair, k, 0.0) - mu);
    row.bound = std::pow(pair.gamma_bound, static_cast<double>(k)) * mu_plus;
    if (row.bound > 0.0) {
      row.ratio = row.exact_bias / row.bound;
    } else {
      row.ratio = row.exact_bias == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

std::optional<std::vector<std::size_t>> find_balanced_split(const Distribution& nominal) {
  const std::size_t n = nominal.size();
  const auto probs = nominal.probs();
  const bool uniform = std::all_of(probs.begin(), probs.end(),
                                   [&](double p) { return p == probs.front(); });
  if (uniform) {
    if (n % 2 != 0) return std::nullopt;
    std::vector<std::size_t> half(n / 2);
    for (std::size_t i = 0; i < n / 2; ++i) half[i] = i;
    return half;
  }
  if (n > 20) return std::nullopt;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n) - 1; ++mask) {
    CompensatedSum inside;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) inside.add(probs[i]);
    }
    if (std::abs(inside.value() - 0.5) <= kProbTolerance / 2) {
      std::vector<std::size_t> split;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint32_t{1} << i)) split.push_back(i);
      }
      return split;
    }
  }
  return std::nullopt;
}

std::vector<BiasDecayRow> bias_decay_sweep(const Population& pop, const Distribution& nominal,
                                           double gamma, unsigned k_min, unsigned k_max,
                                           std::optional<std::vector<std::size_t>> split) {
  if (!split) split = find_balanced_split(nominal);
  if (!split) throw std::invalid_argument("no split carrying half the nominal mass was found");
  return bias_decay_sweep(pop, worst_case_pair(nominal, gamma, *split), k_min, k_max);
}

Population saturating_population(const PerturbedPair& pair, unsigned k) {
  std::vector<double> values(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double g = pair.deviations[i];
    if (g == 0.0) {
      values[i] = 0.0;
    } else {
      values[i] = (g < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
    }
  }
  return Population(std::move(values));
}

ZeroOneResult zero_one_experiment(std::uint64_t n, double fraction_ones, double gamma, double eps,
                                  std::uint64_t trials, double c_m, double c_t,
                                  std::uint64_t seed, unsigned threads) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be even and at least 2");
  if (!(fraction_ones >= 0.0 && fraction_ones <= 1.0)) {
    throw std::invalid_argument("fraction_ones must lie in [0,1]");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(eps > 0.0 && eps <= gamma)) throw std::invalid_argument("eps must lie in (0, gamma]");

  const auto ones = static_cast<std::uint64_t>(std::ceil(fraction_ones * static_cast<double>(n)));
  std::vector<double> values(n, 0.0);
  std::fill(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(ones), 1.0);
  Population pop(std::move(values));
  const Distribution nominal = Distribution::uniform(n);
  std::vector<std::size_t> split(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) split[i] = i;

  const double nd = static_cast<double>(n);
  const double mu = pop.sum();
  PlanParameters plan;
  plan.gamma = gamma;
  plan.eps1 = eps;
  plan.eps2 = eps * std::sqrt(mu * nd);
  plan.c_m = c_m;
  plan.c_t = c_t;
  plan.k = order_for(gamma, eps);
  const double k = plan.k;
  plan.m = static_cast<std::uint64_t>(
      std::max(k, std::ceil(c_m * std::pow(nd, 1.0 - 1.0 / k) * std::pow(eps, -2.0 / k))));
  const double v = population_stats(pop, nominal).var_hh;
  const double pilot_load = plan.eps2 > 0.0 ? std::pow(gamma, 2.0 * k) * v / (plan.eps2 * plan.eps2) : 0.0;
  plan.t = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(c_t * (1.0 + pilot_load))));

  TrialConfig config{pop, worst_case_pair(nominal, gamma, split), plan};
  config.trials = trials;
  config.base_seed = seed;
  config.functional = ErrorFunctional::kCorollary;
  config.eps = eps;
  config.eps1 = eps;
  config.eps2 = plan.eps2;
  config.threads = threads;
  return ZeroOneResult{run_trials(config), plan, n, ones};
}

std::vector<DistinguishRow> distinguishability_experiment(const RealizedPair& pair,
                                                          const DistinguishConfig& config) {
  if (config.trials < 30) {
    throw std::invalid_argument("distinguishability needs at least 30 trials per arm");
  }
  if (config.m_values.empty()) throw std::invalid_argument("empty m sweep");
  const unsigned order = config.order == 0 ? pair.k + 1 : config.order;

  const ReductionInstance a = build_reduction_instance(pair, config.arm_a, config.seed);
  const ReductionInstance b = build_reduction_instance(pair, config.arm_b, config.seed);
  auto arm_config = [&](const ReductionInstance& inst, std::uint64_t m, std::uint64_t base) {
    std::vector<double> deviations(inst.nominal.size());
    for (std::size_t i = 0; i < deviations.size(); ++i) {
      deviations[i] = inst.true_dist[i] / inst.nominal[i] - 1.0;
    }
    PerturbedPair perturbed{inst.nominal, inst.true_dist, std::move(deviations), inst.closeness};
    PlanParameters plan;
    plan.k = order;
    plan.m = m;
    plan.t = m;
    plan.gamma = inst.closeness;
    TrialConfig tc{inst.population, std::move(perturbed), plan};
    tc.trials = config.trials;
    tc.base_seed = base;
    tc.threads = config.threads;
    return tc;
  };

  std::vector<DistinguishRow> rows;
  for (std::uint64_t m : config.m_values) {
    const auto stats_a = run_trials(arm_config(a, m, config.seed));
    const auto stats_b = run_trials(arm_config(b, m, config.seed + config.trials));
    DistinguishRow row;
    row.m = m;
    row.mean_a = stats_a.empirical_mean;
    row.mean_b = stats_b.empirical_mean;
    row.var_a = stats_a.empirical_variance;
    row.var_b = stats_b.empirical_variance;
    const double t = static_cast<double>(config.trials);
    const double se = std::sqrt(row.var_a / t + row.var_b / t);
    const double diff = std::abs(row.mean_a - row.mean_b);
    if (se > 0.0) {
      row.separation_z = diff / se;
    } else {
      row.separation_z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace noisysum
