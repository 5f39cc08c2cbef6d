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

// Collision-based sum estimators for samples drawn from a distribution Q that
// is only pointwise close to the known nominal distribution P.
//
// The h-wise collision estimator averages x_i / P(i)^h over every h-subset of
// the m samples that landed on the same index i:
//
//   xi_h = binom(m, h)^-1 * sum_i binom(Y_i, h) * (x_i - P(i) W) / P(i)^h
//
// and the order-k combination
//
//   W + sum_{h=1..k} (-1)^{h+1} binom(k, h) xi_h
//
// has bias at most gamma^k * sum_i |x_i - P(i) W|, because
// sum_h (-1)^{h+1} binom(k,h) (1+g)^h = 1 + (-1)^{k+1} g^k.
// With k = 1 and W = 0 this is the Hansen-Hurwitz estimator.

#ifndef NOISYSUM_ESTIMATORS_HPP
#define NOISYSUM_ESTIMATORS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "noisysum/model.hpp"

namespace noisysum {

/// Raised when a requested configuration cannot be run: a plan whose order
/// exceeds the cap, an enumeration above its budget, and similar.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest supported estimator order.
inline constexpr unsigned kMaxOrder = 32;

/// Counts Y_i of each index among m samples. `support` lists the indices with
/// a nonzero count in increasing order.
struct FrequencyVector {
  std::vector<std::uint64_t> counts;
  std::vector<std::size_t> support;
  std::uint64_t m = 0;
};

FrequencyVector frequency_vector(const SampleBatch& batch, std::size_t n);
FrequencyVector frequency_vector(std::span<const std::size_t> indices, std::size_t n);

/// binom(y, h) / (binom(m, h) * p^h) * centered, evaluated as the running
/// product prod_{j<h} (y - j) / ((m - j) p). Falls back to log space when an
/// intermediate exceeds 1e300 in magnitude.
double collision_term(std::uint64_t y, unsigned h, std::uint64_t m, double p, double centered);

/// The h-wise collision estimator with centering W. Visits only sampled
/// indices.
double xi_h(const FrequencyVector& freq, unsigned h, const Population& pop,
            const Distribution& nominal, double w);

struct EstimatorReport {
  double estimate = 0.0;
  unsigned k = 0;
  std::uint64_t m = 0;
  std::uint64_t t = 0;
  double pilot_w = 0.0;
  std::vector<double> xi_values;
  std::uint64_t seed = 0;
};

/// Returns W + sum_{h=1..k} (-1)^{h+1} binom(k,h) xi_h on the given batch.
EstimatorReport estimate_sum(const SampleBatch& batch, unsigned k, double w,
                             const Population& pop, const Distribution& nominal);
EstimatorReport estimate_sum(const FrequencyVector& freq, unsigned k, double w,
                             const Population& pop, const Distribution& nominal);

/// Default constants standing in for the O(.) in the sample-size bounds.
inline constexpr double kDefaultCm = 4.0;
inline constexpr double kDefaultCt = 16.0;

struct PlanParameters {
  unsigned k = 1;
  std::uint64_t m = 1;
  std::uint64_t t = 1;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double gamma = 0.0;
  double c_m = kDefaultCm;
  double c_t = kDefaultCt;
};

/// Smallest k with gamma^k <= eps1, i.e. ceil(lg eps1 / lg gamma).
unsigned order_for(double gamma, double eps1);

/// k = ceil(lg eps1 / lg gamma),
/// m = ceil(c_m (n_tilde^{k-1} eps2^-2 V)^{1/k}) clamped to >= k,
/// t = ceil(c_t (1 + gamma^{2k} eps2^-2 V)).
/// V is any upper bound on the Hansen-Hurwitz variance.
PlanParameters plan_parameters(double gamma, double eps1, double eps2, double n_tilde, double v,
                               double c_m = kDefaultCm, double c_t = kDefaultCt);

/// Two-stage estimate: a t-sample Hansen-Hurwitz pilot W, then the order-k
/// estimator centered at W on m fresh samples. Both stages draw from one
/// generator seeded with `seed`.
EstimatorReport improved_estimate_sum(const AliasSampler& sampler, const PlanParameters& plan,
                                      const Population& pop, const Distribution& nominal,
                                      std::uint64_t seed);

/// Offline variant over pre-drawn indices: the first t feed the pilot, the
/// next m the second stage. Extra indices are ignored.
EstimatorReport improved_estimate_sum(std::span<const std::size_t> indices,
                                      const PlanParameters& plan, const Population& pop,
                                      const Distribution& nominal);

/// Exact expectation of estimate_sum for a fixed W:
/// W + sum_i (x_i - P(i) W) (1 + (-1)^{k+1} gamma_i^k).
double closed_form_expectation(const Population& pop, const PerturbedPair& pair, unsigned k,
                               double w);

/// Bias bound on centered values. k >= 2: gamma^k sum_i |xbar_i|;
/// k = 1: gamma sum_i |xbar_i - P(i) mubar|.
double bias_bound(const Population& pop, const Distribution& nominal, double gamma, unsigned k,
                  double w);

/// Variance bound on centered values. For k >= 2 the larger of
///   2 (1+g) g^{2k-2} k^2 S / m   and   2^k (1+g)^k k^{3k} n_tilde^{k-1} S / m^k,
/// with S = sum_i xbar_i^2 / P(i); for k = 1, (1+g) sum_i (xbar_i - P(i) mubar)^2 / P(i) / m.
double variance_bound(const Population& pop, const Distribution& nominal, double gamma,
                      unsigned k, std::uint64_t m, double w);

}  // namespace noisysum

#endif  // NOISYSUM_ESTIMATORS_HPP
