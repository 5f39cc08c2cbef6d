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

// Numeric validators for the combinatorial identities behind the estimator
// analysis. Integer identities are evaluated exactly; real identities take
// double inputs and evaluate both sides in 113-bit binary floating point.

#ifndef NOISYSUM_IDENTITIES_HPP
#define NOISYSUM_IDENTITIES_HPP

#include <cstdint>
#include <span>

namespace noisysum {

struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / max(1, |lhs|, |rhs|), computed before rounding to double.
  double residual = 0.0;
};

/// sum_{h=1..k} (-1)^{h+1} binom(k,h) binom(h,j), exactly.
/// Expected: 1 for j = 0, (-1)^{k+1} for j = k, 0 otherwise.
std::int64_t binomial_collision_identity(unsigned k, unsigned j);

/// The case split binomial_collision_identity should reproduce.
std::int64_t binomial_collision_expected(unsigned k, unsigned j);

/// lhs = 1 + (-1)^{k+1} gamma^k, rhs = sum_{h=1..k} (-1)^{h+1} binom(k,h) (1+gamma)^h.
IdentityResidual bias_identity_residual(unsigned k, double gamma);

/// lhs = prod_j beta_j - (1+alpha)^|I|,
/// rhs = sum over nonempty J of (1+alpha)^{|I|-|J|} prod_{j in J} (beta_j - (1+alpha)).
/// At most 20 betas.
IdentityResidual prod_mean_zero_residual(std::span<const double> betas, double alpha);

/// Both sides of the mean-zero rewriting used for the variance bound, by
/// explicit enumeration of all subsets I of [m] with 0 < |I| <= k:
///   lhs = sum_I (-1)^{|I|+1} binom(k,|I|)/binom(m,|I|) (prod_I beta - (1+alpha)^{|I|})
///   rhs = (-1)^{k+1} sum_I binom(k,|I|)/binom(m,|I|) alpha^{k-|I|} prod_I (beta - (1+alpha))
/// Requires k <= m <= 16.
IdentityResidual expression_mean_zero_residual(std::span<const double> betas, double alpha,
                                               unsigned k);

/// Maximum residual tolerated by the identity suite.
inline constexpr double kIdentityTolerance = 1e-9;

struct IdentitySuiteReport {
  std::uint64_t binomial_cases = 0;
  std::uint64_t binomial_mismatches = 0;
  std::uint64_t bias_cases = 0;
  double bias_max_residual = 0.0;
  std::uint64_t prod_cases = 0;
  double prod_max_residual = 0.0;
  std::uint64_t expression_cases = 0;
  double expression_max_residual = 0.0;

  double max_residual() const;
  bool passed() const;
};

/// Runs every validator: the binomial identity for all 1 <= k <= 32; the bias
/// identity for k <= kmax on the grid {0, +-0.1, +-0.5, +-0.9} plus 100 random
/// gamma in (-1, 1); 100 random product identities with at most 8 betas; 200
/// random mean-zero rewritings with m <= 10.
IdentitySuiteReport run_identity_suite(unsigned kmax, std::uint64_t seed);

}  // namespace noisysum

#endif  // NOISYSUM_IDENTITIES_HPP
