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

#include "noisysum/identities.hpp"

#include "noisysum/model.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace noisysum {
namespace {

using boost::multiprecision::cpp_int;
using Quad = boost::multiprecision::cpp_bin_float_quad;

cpp_int exact_binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  cpp_int r = 1;
  for (unsigned j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

Quad quad_binomial(unsigned n, unsigned k) { return Quad(exact_binomial(n, k)); }

Quad int_pow(Quad base, unsigned e) {
  Quad r = 1;
  for (; e > 0; --e) r *= base;
  return r;
}

IdentityResidual make_residual(const Quad& lhs, const Quad& rhs) {
  using boost::multiprecision::abs;
  const Quad scale = std::max({Quad(1), abs(lhs), abs(rhs)});
  return IdentityResidual{static_cast<double>(lhs), static_cast<double>(rhs),
                          static_cast<double>(abs(lhs - rhs) / scale)};
}

}  // namespace

std::int64_t binomial_collision_identity(unsigned k, unsigned j) {
  if (k == 0 || k > 32) throw std::invalid_argument("k must lie in [1, 32]");
  if (j > k) throw std::invalid_argument("j = " + std::to_string(j) + " outside [0, k]");
  cpp_int sum = 0;
  for (unsigned h = 1; h <= k; ++h) {
    const cpp_int term = exact_binomial(k, h) * exact_binomial(h, j);
    if (h % 2 == 1) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return static_cast<std::int64_t>(sum);
}

std::int64_t binomial_collision_expected(unsigned k, unsigned j) {
  if (j == 0) return 1;
  if (j == k) return (k % 2 == 1) ? 1 : -1;
  return 0;
}

IdentityResidual bias_identity_residual(unsigned k, double gamma) {
  if (k == 0 || k > 32) throw std::invalid_argument("k must lie in [1, 32]");
  const Quad g = gamma;
  const Quad lhs = 1 + ((k % 2 == 1) ? 1 : -1) * int_pow(g, k);
  Quad rhs = 0;
  for (unsigned h = 1; h <= k; ++h) {
    const Quad term = quad_binomial(k, h) * int_pow(1 + g, h);
    rhs += (h % 2 == 1) ? term : -term;
  }
  return make_residual(lhs, rhs);
}

IdentityResidual prod_mean_zero_residual(std::span<const double> betas, double alpha) {
  if (betas.size() > 20) throw std::invalid_argument("prod_mean_zero_residual: at most 20 betas");
  const auto n = static_cast<unsigned>(betas.size());
  const Quad base = 1 + Quad(alpha);

  Quad product = 1;
  for (double b : betas) product *= Quad(b);
  const Quad lhs = product - int_pow(base, n);

  std::vector<Quad> shifted(n);
  for (unsigned j = 0; j < n; ++j) shifted[j] = Quad(betas[j]) - base;
  Quad rhs = 0;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    Quad term = int_pow(base, n - static_cast<unsigned>(std::popcount(mask)));
    for (unsigned j = 0; j < n; ++j) {
      if (mask & (std::uint32_t{1} << j)) term *= shifted[j];
    }
    rhs += term;
  }
  return make_residual(lhs, rhs);
}

IdentityResidual expression_mean_zero_residual(std::span<const double> betas, double alpha,
                                               unsigned k) {
  const auto m = static_cast<unsigned>(betas.size());
  if (m > 16) throw std::invalid_argument("expression_mean_zero_residual: m must be <= 16");
  if (k == 0 || k > m) throw std::invalid_argument("expression_mean_zero_residual: need 1 <= k <= m");

  const Quad a = alpha;
  const Quad base = 1 + a;
  std::vector<Quad> ratio(k + 1);
  for (unsigned s = 1; s <= k; ++s) ratio[s] = quad_binomial(k, s) / quad_binomial(m, s);
  std::vector<Quad> shifted(m);
  for (unsigned j = 0; j < m; ++j) shifted[j] = Quad(betas[j]) - base;

  Quad lhs = 0;
  Quad rhs = 0;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
    const auto size = static_cast<unsigned>(std::popcount(mask));
    if (size > k) continue;
    Quad product = 1;
    Quad shifted_product = 1;
    for (unsigned j = 0; j < m; ++j) {
      if (mask & (std::uint32_t{1} << j)) {
        product *= Quad(betas[j]);
        shifted_product *= shifted[j];
      }
    }
    const Quad left = ratio[size] * (product - int_pow(base, size));
    lhs += (size % 2 == 1) ? left : -left;
    rhs += ratio[size] * int_pow(a, k - size) * shifted_product;
  }
  if (k % 2 == 0) rhs = -rhs;
  return make_residual(lhs, rhs);
}

double IdentitySuiteReport::max_residual() const {
  return std::max({bias_max_residual, prod_max_residual, expression_max_residual});
}

bool IdentitySuiteReport::passed() const {
  return binomial_mismatches == 0 && max_residual() <= kIdentityTolerance;
}

IdentitySuiteReport run_identity_suite(unsigned kmax, std::uint64_t seed) {
  if (kmax == 0 || kmax > 32) throw std::invalid_argument("kmax must lie in [1, 32]");
  IdentitySuiteReport report;
  for (unsigned k = 1; k <= 32; ++k) {
    for (unsigned j = 0; j <= k; ++j) {
      ++report.binomial_cases;
      if (binomial_collision_identity(k, j) != binomial_collision_expected(k, j)) {
        ++report.binomial_mismatches;
      }
    }
  }

  Rng rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };

  std::vector<double> gammas = {0.0, 0.1, -0.1, 0.5, -0.5, 0.9, -0.9};
  for (int r = 0; r < 100; ++r) gammas.push_back(uniform(-1.0, 1.0));
  for (unsigned k = 1; k <= kmax; ++k) {
    for (double g : gammas) {
      ++report.bias_cases;
      report.bias_max_residual =
          std::max(report.bias_max_residual, bias_identity_residual(k, g).residual);
    }
  }

  for (int r = 0; r < 100; ++r) {
    std::vector<double> betas(1 + uniform_below(rng, 8));
    for (auto& b : betas) b = uniform(-2.0, 3.0);
    const double alpha = uniform(-1.0, 1.0);
    ++report.prod_cases;
    report.prod_max_residual =
        std::max(report.prod_max_residual, prod_mean_zero_residual(betas, alpha).residual);
  }

  for (int r = 0; r < 200; ++r) {
    const auto m = static_cast<unsigned>(1 + uniform_below(rng, 10));
    const auto k = static_cast<unsigned>(1 + uniform_below(rng, m));
    std::vector<double> betas(m);
    for (auto& b : betas) b = uniform(-2.0, 3.0);
    const double alpha = uniform(-1.0, 1.0);
    ++report.expression_cases;
    report.expression_max_residual = std::max(
        report.expression_max_residual, expression_mean_zero_residual(betas, alpha, k).residual);
  }
  return report;
}

}  // namespace noisysum
