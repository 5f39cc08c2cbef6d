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

// Ground truth by brute force: every sample tuple in [N]^m is visited once,
// weighted by prod_j Q(X_j), and the estimator is evaluated on its frequency
// vector.

#ifndef NOISYSUM_EXACT_ORACLE_HPP
#define NOISYSUM_EXACT_ORACLE_HPP

#include <cstdint>

#include "noisysum/model.hpp"

namespace noisysum {

/// Largest N^m the oracle will enumerate.
inline constexpr std::uint64_t kOracleBudget = 10'000'000;

struct ExactMoments {
  double expectation = 0.0;
  double variance = 0.0;
  std::uint64_t outcome_count = 0;
  double total_prob = 0.0;
};

/// Exact mean and variance of estimate_sum(m samples, order k, centering W).
/// Throws InfeasibleError above the enumeration budget. `threads` only
/// changes wall-clock time.
ExactMoments exact_estimator_moments(const Population& pop, const PerturbedPair& pair,
                                     std::uint64_t m, unsigned k, double w,
                                     unsigned threads = 1);

/// Exact mean and variance of the single collision estimator xi_h.
ExactMoments exact_xi_moments(const Population& pop, const PerturbedPair& pair, std::uint64_t m,
                              unsigned h, double w, unsigned threads = 1);

}  // namespace noisysum

#endif  // NOISYSUM_EXACT_ORACLE_HPP
