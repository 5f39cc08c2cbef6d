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

#include "noisysum/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "noisysum/numeric.hpp"

namespace noisysum {
namespace {

constexpr double kLogSpaceThreshold = 1e300;
// Plans asking for more samples than this are reported as infeasible.
constexpr double kMaxPlannedSamples = 1e15;

void check_shapes(const Population& pop, const Distribution& nominal) {
  if (pop.size() != nominal.size()) {
    throw std::invalid_argument("population and nominal distribution differ in size");
  }
}

double centered_value(const Population& pop, const Distribution& nominal, std::size_t i,
                      double w) {
  return pop[i] - nominal[i] * w;
}

void check_order(unsigned k, std::uint64_t m) {
  if (k == 0) throw std::invalid_argument("estimator order k must be at least 1");
  if (k > kMaxOrder) {
    throw std::invalid_argument("estimator order k = " + std::to_string(k) + " exceeds cap " +
                                std::to_string(kMaxOrder));
  }
  if (k > m) {
    throw std::invalid_argument("estimator order k = " + std::to_string(k) +
                                " exceeds sample count m = " + std::to_string(m));
  }
}

// Ceiling that ignores rounding noise just above an integer, so exact sizes
// such as 4 * sqrt(40000) do not round up to the next sample.
double ceil_snapped(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return nearest;
  return std::ceil(x);
}

}  // namespace

FrequencyVector frequency_vector(std::span<const std::size_t> indices, std::size_t n) {
  if (indices.empty()) throw std::invalid_argument("empty sample batch");
  FrequencyVector freq;
  freq.counts.assign(n, 0);
  freq.m = indices.size();
  for (std::size_t idx : indices) {
    if (idx >= n) {
      throw std::invalid_argument("sample index " + std::to_string(idx + 1) +
                                  " outside [1, " + std::to_string(n) + "]");
    }
    if (freq.counts[idx]++ == 0) freq.support.push_back(idx);
  }
  std::sort(freq.support.begin(), freq.support.end());
  return freq;
}

FrequencyVector frequency_vector(const SampleBatch& batch, std::size_t n) {
  return frequency_vector(std::span<const std::size_t>(batch.indices), n);
}

double collision_term(std::uint64_t y, unsigned h, std::uint64_t m, double p, double centered) {
  if (h == 0) throw std::invalid_argument("collision order h must be at least 1");
  if (h > m) throw std::invalid_argument("collision order h exceeds sample count");
  if (y < h || centered == 0.0) return 0.0;
  if (!(p > 0.0)) throw std::invalid_argument("zero nominal probability");

  double product = centered;
  bool overflow = false;
  for (unsigned j = 0; j < h; ++j) {
    product *= static_cast<double>(y - j) / (static_cast<double>(m - j) * p);
    if (!(std::abs(product) <= kLogSpaceThreshold)) {
      overflow = true;
      break;
    }
  }
  if (!overflow) return product;

  double log_magnitude = std::log(std::abs(centered));
  for (unsigned j = 0; j < h; ++j) {
    log_magnitude += std::log(static_cast<double>(y - j)) - std::log(static_cast<double>(m - j)) -
                     std::log(p);
  }
  return std::copysign(std::exp(log_magnitude), centered);
}

double xi_h(const FrequencyVector& freq, unsigned h, const Population& pop,
            const Distribution& nominal, double w) {
  check_shapes(pop, nominal);
  if (freq.counts.size() != pop.size()) {
    throw std::invalid_argument("frequency vector and population differ in size");
  }
  if (h == 0 || h > freq.m) {
    throw std::invalid_argument("collision order h = " + std::to_string(h) +
                                " outside [1, m = " + std::to_string(freq.m) + "]");
  }
  CompensatedSum sum;
  for (std::size_t i : freq.support) {
    if (!(nominal[i] > 0.0)) throw std::invalid_argument("zero nominal probability entry");
    sum.add(collision_term(freq.counts[i], h, freq.m, nominal[i],
                           centered_value(pop, nominal, i, w)));
  }
  return sum.value();
}

EstimatorReport estimate_sum(const FrequencyVector& freq, unsigned k, double w,
                             const Population& pop, const Distribution& nominal) {
  check_order(k, freq.m);
  EstimatorReport report;
  report.k = k;
  report.m = freq.m;
  report.pilot_w = w;
  report.xi_values.reserve(k);
  CompensatedSum combo;
  combo.add(w);
  for (unsigned h = 1; h <= k; ++h) {
    const double xi = xi_h(freq, h, pop, nominal, w);
    report.xi_values.push_back(xi);
    const double sign = (h % 2 == 1) ? 1.0 : -1.0;
    combo.add(sign * binomial(k, h) * xi);
  }
  report.estimate = combo.value();
  return report;
}

EstimatorReport estimate_sum(const SampleBatch& batch, unsigned k, double w,
                             const Population& pop, const Distribution& nominal) {
  check_order(k, batch.m());
  auto report = estimate_sum(frequency_vector(batch, pop.size()), k, w, pop, nominal);
  report.seed = batch.seed;
  return report;
}

unsigned order_for(double gamma, double eps1) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("eps1 must lie in (0,1)");
  double ratio = std::log2(eps1) / std::log2(gamma);
  // Snap ratios that are integers up to rounding, e.g. eps1 = gamma^2.
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, nearest)) ratio = nearest;
  const double k = std::max(1.0, std::ceil(ratio));
  if (k > kMaxOrder) {
    throw InfeasibleError("planned order k = " + std::to_string(static_cast<long long>(k)) +
                          " exceeds cap " + std::to_string(kMaxOrder));
  }
  return static_cast<unsigned>(k);
}

PlanParameters plan_parameters(double gamma, double eps1, double eps2, double n_tilde, double v,
                               double c_m, double c_t) {
  if (!(eps2 > 0.0)) throw std::invalid_argument("eps2 must be positive");
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("V must be finite and >= 0");
  if (!(n_tilde >= 1.0)) throw std::invalid_argument("n_tilde must be at least 1");
  if (!(c_m > 0.0) || !(c_t > 0.0)) throw std::invalid_argument("plan constants must be positive");

  PlanParameters plan;
  plan.gamma = gamma;
  plan.eps1 = eps1;
  plan.eps2 = eps2;
  plan.c_m = c_m;
  plan.c_t = c_t;
  plan.k = order_for(gamma, eps1);
  const double k = plan.k;

  double m = 0.0;
  if (v > 0.0) {
    const double inner = std::pow(n_tilde, k - 1.0) * v / (eps2 * eps2);
    double root = 0.0;
    if (std::isfinite(inner) && inner > 0.0) {
      root = plan.k == 1 ? inner : plan.k == 2 ? std::sqrt(inner) : std::pow(inner, 1.0 / k);
    } else {
      const double log_inner = (k - 1.0) * std::log(n_tilde) - 2.0 * std::log(eps2) + std::log(v);
      root = std::exp(log_inner / k);
    }
    m = ceil_snapped(c_m * root);
  }
  m = std::max(m, k);
  const double t = ceil_snapped(c_t * (1.0 + std::pow(gamma, 2.0 * k) * v / (eps2 * eps2)));
  if (!(m <= kMaxPlannedSamples) || !(t <= kMaxPlannedSamples)) {
    throw InfeasibleError("plan requires more than 1e15 samples");
  }
  plan.m = static_cast<std::uint64_t>(m);
  plan.t = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(t));
  return plan;
}

namespace {

void check_plan(const PlanParameters& plan) {
  if (plan.t == 0) throw std::invalid_argument("pilot sample size t must be at least 1");
  check_order(plan.k, plan.m);
}

EstimatorReport second_stage(std::span<const std::size_t> pilot,
                             std::span<const std::size_t> main, const PlanParameters& plan,
                             const Population& pop, const Distribution& nominal) {
  const double w = estimate_sum(frequency_vector(pilot, pop.size()), 1, 0.0, pop, nominal).estimate;
  auto report = estimate_sum(frequency_vector(main, pop.size()), plan.k, w, pop, nominal);
  report.t = plan.t;
  return report;
}

}  // namespace

EstimatorReport improved_estimate_sum(const AliasSampler& sampler, const PlanParameters& plan,
                                      const Population& pop, const Distribution& nominal,
                                      std::uint64_t seed) {
  check_plan(plan);
  check_shapes(pop, nominal);
  if (sampler.size() != pop.size()) {
    throw std::invalid_argument("sampler and population differ in size");
  }
  Rng rng(seed);
  std::vector<std::size_t> pilot(plan.t);
  std::vector<std::size_t> main(plan.m);
  sampler.fill(rng, pilot);
  sampler.fill(rng, main);
  auto report = second_stage(pilot, main, plan, pop, nominal);
  report.seed = seed;
  return report;
}

EstimatorReport improved_estimate_sum(std::span<const std::size_t> indices,
                                      const PlanParameters& plan, const Population& pop,
                                      const Distribution& nominal) {
  check_plan(plan);
  check_shapes(pop, nominal);
  if (indices.size() < plan.t + plan.m) {
    throw InfeasibleError("sample file holds " + std::to_string(indices.size()) +
                          " indices but the plan needs t + m = " +
                          std::to_string(plan.t + plan.m));
  }
  return second_stage(indices.subspan(0, plan.t), indices.subspan(plan.t, plan.m), plan, pop,
                      nominal);
}

double closed_form_expectation(const Population& pop, const PerturbedPair& pair, unsigned k,
                               double w) {
  check_shapes(pop, pair.nominal);
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  CompensatedSum sum;
  sum.add(w);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double xbar = centered_value(pop, pair.nominal, i, w);
    sum.add(xbar * (1.0 + sign * std::pow(pair.deviations[i], static_cast<double>(k))));
  }
  return sum.value();
}

double bias_bound(const Population& pop, const Distribution& nominal, double gamma, unsigned k,
                  double w) {
  check_shapes(pop, nominal);
  if (k == 0) throw std::invalid_argument("estimator order k must be at least 1");
  CompensatedSum acc;
  if (k >= 2) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      acc.add(std::abs(centered_value(pop, nominal, i, w)));
    }
    return std::pow(gamma, static_cast<double>(k)) * acc.value();
  }
  const double mubar = pop.sum() - w;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    acc.add(std::abs(centered_value(pop, nominal, i, w) - nominal[i] * mubar));
  }
  return gamma * acc.value();
}

double variance_bound(const Population& pop, const Distribution& nominal, double gamma,
                      unsigned k, std::uint64_t m, double w) {
  check_shapes(pop, nominal);
  if (k == 0 || m < k) throw std::invalid_argument("variance bound needs m >= k >= 1");
  if (!nominal.all_positive()) throw std::invalid_argument("zero nominal probability entry");
  const double md = static_cast<double>(m);
  CompensatedSum acc;
  if (k == 1) {
    const double mubar = pop.sum() - w;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double r = centered_value(pop, nominal, i, w) - nominal[i] * mubar;
      acc.add(r * r / nominal[i]);
    }
    return (1.0 + gamma) * acc.value() / md;
  }
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double xbar = centered_value(pop, nominal, i, w);
    acc.add(xbar * xbar / nominal[i]);
  }
  const double s = acc.value();
  const double kd = k;
  const double low_order =
      2.0 * (1.0 + gamma) * std::pow(gamma, 2.0 * kd - 2.0) * kd * kd * s / md;
  const double high_order = std::pow(2.0 * (1.0 + gamma), kd) * std::pow(kd, 3.0 * kd) *
                            std::pow(nominal.n_tilde(), kd - 1.0) * s / std::pow(md, kd);
  return std::max(low_order, high_order);
}

}  // namespace noisysum
