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

#include "noisysum/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "noisysum/numeric.hpp"

namespace noisysum {

Population::Population(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("population must be non-empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("population value " + std::to_string(i + 1) + " is not finite");
    }
  }
}

double Population::sum() const {
  CompensatedSum s;
  for (double x : values_) s.add(x);
  return s.value();
}

double Population::positive_sum() const {
  CompensatedSum s;
  for (double x : values_) s.add(std::abs(x));
  return s.value();
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("distribution must be non-empty");
  CompensatedSum total;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("probability " + std::to_string(i + 1) + " outside [0,1]");
    }
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > kProbTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total.value()) +
                                ", not 1");
  }
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform distribution over empty set");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Distribution::n_tilde() const {
  double worst = 0.0;
  for (double p : probs_) {
    if (p <= 0.0) throw std::invalid_argument("n_tilde undefined: zero probability entry");
    worst = std::max(worst, 1.0 / p);
  }
  return worst;
}

bool Distribution::all_positive() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

double PerturbedPair::max_ratio_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (nominal[i] > 0.0) worst = std::max(worst, std::abs(true_dist[i] / nominal[i] - 1.0));
  }
  return worst;
}

PopulationStats population_stats(const Population& pop, const Distribution& nominal) {
  if (pop.size() != nominal.size()) {
    throw std::invalid_argument("population has " + std::to_string(pop.size()) +
                                " values but distribution has " +
                                std::to_string(nominal.size()) + " entries");
  }
  if (!nominal.all_positive()) throw std::invalid_argument("zero nominal probability entry");

  PopulationStats stats;
  stats.mu = pop.sum();
  stats.mu_plus = pop.positive_sum();
  stats.n_tilde = nominal.n_tilde();
  CompensatedSum var;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double r = pop[i] / nominal[i] - stats.mu;
    var.add(nominal[i] * r * r);
  }
  stats.var_hh = var.value();
  return stats;
}

PerturbedPair make_perturbed(const Distribution& nominal, std::vector<double> deviations,
                             double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  if (deviations.size() != nominal.size()) {
    throw std::invalid_argument("deviation count does not match distribution size");
  }
  CompensatedSum balance;
  std::vector<double> q(nominal.size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    const double g = deviations[i];
    if (!std::isfinite(g) || std::abs(g) > gamma) {
      throw std::invalid_argument("deviation " + std::to_string(i + 1) + " = " +
                                  std::to_string(g) + " exceeds gamma = " +
                                  std::to_string(gamma));
    }
    balance.add(g * nominal[i]);
    q[i] = (1.0 + g) * nominal[i];
  }
  if (std::abs(balance.value()) > kProbTolerance) {
    throw std::invalid_argument("deviations are not mass-balancing: sum gamma_i P(i) = " +
                                std::to_string(balance.value()));
  }
  // Distribution's constructor rejects a Q that is not a probability vector.
  Distribution true_dist(std::move(q));
  return PerturbedPair{nominal, std::move(true_dist), std::move(deviations), gamma};
}

PerturbedPair worst_case_pair(const Distribution& nominal, double gamma,
                              std::span<const std::size_t> split) {
  std::vector<bool> in_split(nominal.size(), false);
  for (std::size_t i : split) {
    if (i >= nominal.size()) throw std::invalid_argument("split index out of range");
    in_split[i] = true;
  }
  CompensatedSum inside;
  CompensatedSum outside;
  for (std::size_t i = 0; i < nominal.size(); ++i) (in_split[i] ? inside : outside).add(nominal[i]);
  if (std::abs(inside.value() - outside.value()) > kProbTolerance) {
    throw std::invalid_argument("split mass " + std::to_string(inside.value()) +
                                " does not balance complement mass " +
                                std::to_string(outside.value()));
  }
  std::vector<double> deviations(nominal.size());
  for (std::size_t i = 0; i < nominal.size(); ++i) deviations[i] = in_split[i] ? gamma : -gamma;
  return make_perturbed(nominal, std::move(deviations), gamma);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

AliasSampler::AliasSampler(const Distribution& dist)
    : prob_(dist.size(), 0.0), alias_(dist.size(), 0) {
  const std::size_t n = dist.size();
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = dist[i] * static_cast<double>(n);
    alias_[i] = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : large) prob_[i] = 1.0;
  for (std::size_t i : small) prob_[i] = dist[i] > 0.0 ? 1.0 : 0.0;
}

std::size_t AliasSampler::operator()(Rng& rng) const {
  const auto column = static_cast<std::size_t>(uniform_below(rng, prob_.size()));
  return uniform01(rng) < prob_[column] ? column : alias_[column];
}

void AliasSampler::fill(Rng& rng, std::span<std::size_t> out) const {
  for (auto& idx : out) idx = (*this)(rng);
}

SampleBatch draw_samples(const Distribution& dist, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("sample size m must be at least 1");
  AliasSampler sampler(dist);
  Rng rng(seed);
  SampleBatch batch;
  batch.seed = seed;
  batch.indices.resize(m);
  sampler.fill(rng, batch.indices);
  return batch;
}

SampleBatch draw_samples(const PerturbedPair& pair, std::size_t m, std::uint64_t seed) {
  return draw_samples(pair.true_dist, m, seed);
}

}  // namespace noisysum
