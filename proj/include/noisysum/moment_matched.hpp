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

// Two nearly uniform distributions D1, D2 whose frequency moments 1..k agree
// exactly while their support sizes differ by Theta(gamma)^k n0.
//
// Level i in [0, k] holds a binom(k,i)/2^{k-1} fraction of the mass, spread
// over atoms of probability (1 + gamma i / k) / n0. Even levels go to D1 and
// odd levels to D2. Since sum_i (-1)^i binom(k,i) P(i) = 0 for every
// polynomial P of degree < k, the moments of order 1..k cancel, while the
// support sizes differ by
//
//   (n0 / 2^{k-1}) (k! / k^k) gamma^k / prod_{i=1..k} (1 + i gamma / k).
//
// All arithmetic is exact (arbitrary-precision rationals). Spectra are stored
// by level; expansion into per-index vectors happens only when a reduction
// instance is built.

#ifndef NOISYSUM_MOMENT_MATCHED_HPP
#define NOISYSUM_MOMENT_MATCHED_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "noisysum/model.hpp"

namespace noisysum {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-0.25", "1/2" exactly.
Rational parse_rational(std::string_view text);
/// "num/den", or "num" for integers.
std::string to_string(const Rational& r);

struct SpectrumLevel {
  unsigned i = 0;
  Rational prob;
  Rational count;
};

struct MassSpectrum {
  std::uint64_t n0 = 1;
  std::vector<SpectrumLevel> levels;

  Rational support_size() const;
  Rational total_mass() const;
  bool integral_counts() const;
};

struct MomentMatchedPair {
  MassSpectrum d1;
  MassSpectrum d2;
  unsigned k = 1;
  Rational gamma;
  Rational n1;
  Rational n2;
  Rational gap;
};

/// sum_{i=0..k} (-1)^i binom(k,i) / (a + gamma i). Throws on a pole.
Rational alternating_binomial_sum(unsigned k, const Rational& a, const Rational& gamma);
/// k! gamma^k / (a (a + gamma) ... (a + k gamma)).
Rational alternating_binomial_closed_form(unsigned k, const Rational& a, const Rational& gamma);

/// Requires k >= 1, 0 < gamma <= 1/2, n0 >= 1. Verifies the moment match and
/// the gap closed form before returning; a mismatch is a logic_error.
MomentMatchedPair construct_pair(unsigned k, const Rational& gamma, std::uint64_t n0);

/// sum over atoms of count * prob^ell.
Rational frequency_moment(const MassSpectrum& spectrum, unsigned ell);

Rational support_gap_closed_form(unsigned k, const Rational& gamma, std::uint64_t n0);

enum class Rounding { kNearest, kFloor };

/// A pair whose level counts are integers and whose probabilities sum to 1.
struct RealizedPair {
  MassSpectrum d1;
  MassSpectrum d2;
  unsigned k = 1;
  Rational gamma;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  /// max over ell <= k of |F_ell(D1) - F_ell(D2)| / F_ell(D1).
  double moment_error = 0.0;
};

/// Rounds every level count except the lowest one per `mode`; the lowest
/// level absorbs the leftover mass (count rounded to nearest) and the
/// probabilities are rescaled so each spectrum has mass exactly 1. Throws
/// when a level would end up empty.
RealizedPair realize_integer_counts(const MomentMatchedPair& pair,
                                    Rounding mode = Rounding::kNearest);

enum class Scenario { kO1, kO2 };

/// 0/1 population over N = n1 + n2 indices with the true sampling
/// distribution of one reduction scenario. Under O1 the ones are D1's support
/// and the zeros D2's, each side carrying half the mass; O2 swaps the roles.
/// Indices are shuffled by a seeded permutation.
struct ReductionInstance {
  Population population;
  Distribution true_dist;
  Distribution nominal;
  std::uint64_t ones = 0;
  /// max_i |N Q(i) - 1|, evaluated exactly.
  double closeness = 0.0;
};

ReductionInstance build_reduction_instance(const RealizedPair& pair, Scenario scenario,
                                           std::uint64_t seed);
/// Accepts only pairs whose counts are already integral.
ReductionInstance build_reduction_instance(const MomentMatchedPair& pair, Scenario scenario,
                                           std::uint64_t seed);

}  // namespace noisysum

#endif  // NOISYSUM_MOMENT_MATCHED_HPP
