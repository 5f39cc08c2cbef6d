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

#include "noisysum/moment_matched.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

namespace noisysum {
namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

BigInt exact_binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (unsigned j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned j = 2; j <= n; ++j) r *= j;
  return r;
}

Rational rational_pow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (; e > 0; --e) r *= base;
  return r;
}

BigInt floor_of(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return q;
}

BigInt round_of(const Rational& r, Rounding mode) {
  return mode == Rounding::kFloor ? floor_of(r) : floor_of(r + Rational(1, 2));
}

double relative_gap(const Rational& a, const Rational& b) {
  if (a == 0) return b == 0 ? 0.0 : 1.0;
  Rational d = (a - b) / a;
  if (d < 0) d = -d;
  return static_cast<double>(d);
}

void check_construction_args(unsigned k, const Rational& gamma, std::uint64_t n0) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (k > 32) throw std::invalid_argument("k must be at most 32");
  if (!(gamma > 0 && gamma <= Rational(1, 2))) {
    throw std::invalid_argument("gamma must lie in (0, 1/2]");
  }
  if (n0 == 0) throw std::invalid_argument("n0 must be at least 1");
}

std::uint64_t to_u64(const Rational& r) {
  if (denominator(r) != 1) throw std::invalid_argument("count is not an integer");
  return static_cast<std::uint64_t>(numerator(r));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("cannot parse rational from '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) return fail();
    return num / den;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  BigInt num = 0;
  BigInt den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
      num = num * 10 + (c - '0');
      if (seen_point) den *= 10;
    } else {
      return fail();
    }
  }
  if (!seen_digit) return fail();
  Rational r(num, den);
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational MassSpectrum::support_size() const {
  Rational s = 0;
  for (const auto& level : levels) s += level.count;
  return s;
}

Rational MassSpectrum::total_mass() const {
  Rational s = 0;
  for (const auto& level : levels) s += level.count * level.prob;
  return s;
}

bool MassSpectrum::integral_counts() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const SpectrumLevel& l) { return denominator(l.count) == 1; });
}

Rational alternating_binomial_sum(unsigned k, const Rational& a, const Rational& gamma) {
  if (k > 32) throw std::invalid_argument("k must be at most 32");
  Rational sum = 0;
  for (unsigned i = 0; i <= k; ++i) {
    const Rational denom = a + gamma * i;
    if (denom == 0) throw std::invalid_argument("pole: a + gamma*i = 0 at i = " + std::to_string(i));
    const Rational term = Rational(exact_binomial(k, i)) / denom;
    sum += (i % 2 == 0) ? term : Rational(-term);
  }
  return sum;
}

Rational alternating_binomial_closed_form(unsigned k, const Rational& a, const Rational& gamma) {
  Rational denom = 1;
  for (unsigned i = 0; i <= k; ++i) {
    const Rational factor = a + gamma * i;
    if (factor == 0) throw std::invalid_argument("pole: a + gamma*i = 0 at i = " + std::to_string(i));
    denom *= factor;
  }
  return Rational(factorial(k)) * rational_pow(gamma, k) / denom;
}

Rational frequency_moment(const MassSpectrum& spectrum, unsigned ell) {
  if (ell == 0) throw std::invalid_argument("moment order must be at least 1");
  Rational s = 0;
  for (const auto& level : spectrum.levels) s += level.count * rational_pow(level.prob, ell);
  return s;
}

Rational support_gap_closed_form(unsigned k, const Rational& gamma, std::uint64_t n0) {
  check_construction_args(k, gamma, n0);
  Rational denom = 1;
  for (unsigned i = 1; i <= k; ++i) denom *= 1 + gamma * i / k;
  const Rational scale = Rational(BigInt(n0), BigInt(1) << (k - 1));
  const Rational stirling = Rational(factorial(k), boost::multiprecision::pow(BigInt(k), k));
  return scale * stirling * rational_pow(gamma, k) / denom;
}

MomentMatchedPair construct_pair(unsigned k, const Rational& gamma, std::uint64_t n0) {
  check_construction_args(k, gamma, n0);
  MomentMatchedPair pair;
  pair.k = k;
  pair.gamma = gamma;
  pair.d1.n0 = n0;
  pair.d2.n0 = n0;
  const BigInt half_mass_den = BigInt(1) << (k - 1);
  for (unsigned i = 0; i <= k; ++i) {
    const Rational level = 1 + gamma * i / k;
    SpectrumLevel atom;
    atom.i = i;
    atom.prob = level / n0;
    atom.count = Rational(exact_binomial(k, i) * n0) / (Rational(half_mass_den) * level);
    (i % 2 == 0 ? pair.d1 : pair.d2).levels.push_back(atom);
  }
  pair.n1 = pair.d1.support_size();
  pair.n2 = pair.d2.support_size();
  pair.gap = pair.n1 - pair.n2;

  if (pair.d1.total_mass() != 1 || pair.d2.total_mass() != 1) {
    throw std::logic_error("moment-matched spectra do not have unit mass");
  }
  for (unsigned ell = 1; ell <= k; ++ell) {
    if (frequency_moment(pair.d1, ell) != frequency_moment(pair.d2, ell)) {
      throw std::logic_error("frequency moment " + std::to_string(ell) + " does not match");
    }
  }
  if (pair.gap != support_gap_closed_form(k, gamma, n0)) {
    throw std::logic_error("support gap disagrees with its closed form");
  }
  return pair;
}

namespace {

MassSpectrum realize_spectrum(const MassSpectrum& spectrum, Rounding mode) {
  MassSpectrum out = spectrum;
  auto& levels = out.levels;
  std::sort(levels.begin(), levels.end(),
            [](const SpectrumLevel& a, const SpectrumLevel& b) { return a.i < b.i; });
  Rational upper_mass = 0;
  for (std::size_t j = 1; j < levels.size(); ++j) {
    levels[j].count = Rational(round_of(levels[j].count, mode));
    upper_mass += levels[j].count * levels[j].prob;
  }
  auto& lowest = levels.front();
  lowest.count = Rational(round_of((1 - upper_mass) / lowest.prob, Rounding::kNearest));
  for (const auto& level : levels) {
    if (level.count <= 0) {
      throw std::invalid_argument("level " + std::to_string(level.i) +
                                  " rounds to zero atoms; increase n0");
    }
  }
  const Rational mass = out.total_mass();
  if (mass != 1) {
    for (auto& level : levels) level.prob /= mass;
  }
  return out;
}

}  // namespace

RealizedPair realize_integer_counts(const MomentMatchedPair& pair, Rounding mode) {
  RealizedPair out;
  out.k = pair.k;
  out.gamma = pair.gamma;
  out.d1 = realize_spectrum(pair.d1, mode);
  out.d2 = realize_spectrum(pair.d2, mode);
  out.n1 = to_u64(out.d1.support_size());
  out.n2 = to_u64(out.d2.support_size());
  for (unsigned ell = 1; ell <= pair.k; ++ell) {
    out.moment_error = std::max(out.moment_error, relative_gap(frequency_moment(out.d1, ell),
                                                               frequency_moment(out.d2, ell)));
  }
  return out;
}

ReductionInstance build_reduction_instance(const RealizedPair& pair, Scenario scenario,
                                           std::uint64_t seed) {
  const MassSpectrum& ones = scenario == Scenario::kO1 ? pair.d1 : pair.d2;
  const MassSpectrum& zeros = scenario == Scenario::kO1 ? pair.d2 : pair.d1;
  if (!ones.integral_counts() || !zeros.integral_counts()) {
    throw std::invalid_argument("reduction instance needs integer level counts");
  }
  const std::uint64_t n_ones = to_u64(ones.support_size());
  const std::uint64_t n = n_ones + to_u64(zeros.support_size());

  std::vector<double> values;
  std::vector<double> probs;
  values.reserve(n);
  probs.reserve(n);
  Rational worst = 0;
  auto expand = [&](const MassSpectrum& spectrum, double value) {
    for (const auto& level : spectrum.levels) {
      const Rational q = level.prob / 2;
      Rational dev = q * n - 1;
      if (dev < 0) dev = -dev;
      worst = std::max(worst, dev);
      const double qd = static_cast<double>(q);
      for (std::uint64_t c = to_u64(level.count); c > 0; --c) {
        values.push_back(value);
        probs.push_back(qd);
      }
    }
  };
  expand(ones, 1.0);
  expand(zeros, 0.0);

  // Relabel indices so the value classes are not contiguous.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  }
  std::vector<double> shuffled_values(n);
  std::vector<double> shuffled_probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    shuffled_values[perm[i]] = values[i];
    shuffled_probs[perm[i]] = probs[i];
  }
  return ReductionInstance{Population(std::move(shuffled_values)),
                           Distribution(std::move(shuffled_probs)), Distribution::uniform(n),
                           n_ones, static_cast<double>(worst)};
}

ReductionInstance build_reduction_instance(const MomentMatchedPair& pair, Scenario scenario,
                                           std::uint64_t seed) {
  if (!pair.d1.integral_counts() || !pair.d2.integral_counts()) {
    throw std::invalid_argument("pair has fractional level counts; realize it first");
  }
  RealizedPair realized;
  realized.k = pair.k;
  realized.gamma = pair.gamma;
  realized.d1 = pair.d1;
  realized.d2 = pair.d2;
  realized.n1 = to_u64(pair.n1);
  realized.n2 = to_u64(pair.n2);
  return build_reduction_instance(realized, scenario, seed);
}

}  // namespace noisysum
