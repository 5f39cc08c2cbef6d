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

// Populations, discrete distributions, pointwise-close perturbations and the
// seeded alias-table sampler.
//
// Indices are 0-based everywhere in the library. File formats and the CLI use
// 1-based indices and convert at the boundary.

#ifndef NOISYSUM_MODEL_HPP
#define NOISYSUM_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace noisysum {

/// Absolute tolerance for normalization and mass-balance checks.
inline constexpr double kProbTolerance = 1e-12;

/// The multiset of values x_1..x_N whose sum is being estimated.
class Population {
 public:
  explicit Population(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// mu = sum of x_i.
  double sum() const;
  /// mu_plus = sum of |x_i|.
  double positive_sum() const;

 private:
  std::vector<double> values_;
};

/// A probability vector over [N]. Zero entries are allowed here; estimators
/// reject them on the nominal side.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// max_i 1/p_i; throws if some entry is zero.
  double n_tilde() const;
  bool all_positive() const;

 private:
  std::vector<double> probs_;
};

/// A known nominal distribution P and the true sampling distribution
/// Q(i) = (1 + gamma_i) P(i) with |gamma_i| <= gamma.
struct PerturbedPair {
  Distribution nominal;
  Distribution true_dist;
  std::vector<double> deviations;
  double gamma_bound = 0.0;

  std::size_t size() const { return nominal.size(); }
  /// max_i |Q(i)/P(i) - 1| over entries with P(i) > 0.
  double max_ratio_deviation() const;
};

struct SampleBatch {
  std::vector<std::size_t> indices;
  std::uint64_t seed = 0;

  std::size_t m() const { return indices.size(); }
};

struct PopulationStats {
  double mu = 0.0;
  double mu_plus = 0.0;
  /// Variance of the single-sample Hansen-Hurwitz estimator under P.
  double var_hh = 0.0;
  double n_tilde = 0.0;
};

PopulationStats population_stats(const Population& pop, const Distribution& nominal);

/// Builds Q(i) = (1 + deviations[i]) P(i). Throws std::invalid_argument when a
/// deviation exceeds gamma, when sum_i deviations[i] P(i) != 0, or when Q is
/// not a distribution.
PerturbedPair make_perturbed(const Distribution& nominal, std::vector<double> deviations,
                             double gamma);

/// gamma_i = +gamma on `split`, -gamma elsewhere. The split must carry exactly
/// half of the nominal mass.
PerturbedPair worst_case_pair(const Distribution& nominal, double gamma,
                              std::span<const std::size_t> split);

/// The generator behind every random stream: std::mt19937_64, whose output
/// sequence is fixed by the C++ standard.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
double uniform01(Rng& rng);
/// Uniform integer in [0, n) by rejection on one 64-bit draw.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Walker/Vose alias table. Built deterministically from the probability
/// vector; each draw consumes exactly two generator outputs (column, coin).
class AliasSampler {
 public:
  explicit AliasSampler(const Distribution& dist);

  std::size_t size() const { return prob_.size(); }
  std::size_t operator()(Rng& rng) const;
  void fill(Rng& rng, std::span<std::size_t> out) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// m i.i.d. draws from dist, seeded with `seed`.
SampleBatch draw_samples(const Distribution& dist, std::size_t m, std::uint64_t seed);
SampleBatch draw_samples(const PerturbedPair& pair, std::size_t m, std::uint64_t seed);

}  // namespace noisysum

#endif  // NOISYSUM_MODEL_HPP
