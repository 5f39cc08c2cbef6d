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

#include "noisysum/exact_oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisysum/estimators.hpp"
#include "noisysum/numeric.hpp"
#include "noisysum/parallel.hpp"

namespace noisysum {
namespace {

// contribution[i][y] is what index i adds to the estimator when Y_i = y.
using ContributionTable = std::vector<std::vector<double>>;

std::uint64_t outcome_count_or_throw(std::size_t n, std::uint64_t m) {
  std::uint64_t count = 1;
  for (std::uint64_t j = 0; j < m; ++j) {
    if (count > kOracleBudget / n) {
      throw InfeasibleError("enumeration of " + std::to_string(n) + "^" + std::to_string(m) +
                            " outcomes exceeds the budget of 1e7");
    }
    count *= n;
  }
  return count;
}

struct Partial {
  CompensatedSum weighted;
  CompensatedSum mass;
};

// Depth-first walk over all tuples with the first sample fixed to `lead`.
// The running estimator value is updated from the one count that changes at
// each level and restored on the way back.
class Enumerator {
 public:
  Enumerator(const ContributionTable& table, const Distribution& q, std::uint64_t m, double offset)
      : table_(table), q_(q), m_(m), offset_(offset), counts_(q.size(), 0) {}

  template <class Visit>
  void run(std::size_t lead, Visit&& visit) {
    std::fill(counts_.begin(), counts_.end(), 0);
    double running = offset_;
    for (const auto& row : table_) running += row[0];
    step(lead, 0, q_[lead], running, visit);
  }

 private:
  template <class Visit>
  void step(std::size_t idx, std::uint64_t depth, double prob, double running, Visit& visit) {
    const auto& row = table_[idx];
    const std::uint64_t before = counts_[idx]++;
    running += row[before + 1] - row[before];
    if (depth + 1 == m_) {
      visit(prob, running);
    } else {
      for (std::size_t next = 0; next < q_.size(); ++next) {
        step(next, depth + 1, prob * q_[next], running, visit);
      }
    }
    --counts_[idx];
  }

  const ContributionTable& table_;
  const Distribution& q_;
  std::uint64_t m_;
  double offset_;
  std::vector<std::uint64_t> counts_;
};

ExactMoments enumerate(const ContributionTable& table, const Distribution& q, std::uint64_t m,
                       double offset, unsigned threads) {
  const std::size_t n = q.size();
  ExactMoments out;
  out.outcome_count = outcome_count_or_throw(n, m);

  // Pass 1: mean. Partials are kept per leading index and folded in index
  // order, so the result does not depend on the thread count.
  std::vector<Partial> first(n);
  parallel_for(n, threads, [&](std::size_t lead) {
    Enumerator walker(table, q, m, offset);
    Partial& part = first[lead];
    walker.run(lead, [&](double prob, double value) {
      part.weighted.add(prob * value);
      part.mass.add(prob);
    });
  });
  CompensatedSum mean;
  CompensatedSum mass;
  for (const auto& part : first) {
    mean.add(part.weighted);
    mass.add(part.mass);
  }
  out.total_prob = mass.value();
  out.expectation = mean.value();

  // Pass 2: central second moment.
  std::vector<CompensatedSum> second(n);
  parallel_for(n, threads, [&](std::size_t lead) {
    Enumerator walker(table, q, m, offset);
    walker.run(lead, [&](double prob, double value) {
      const double d = value - out.expectation;
      second[lead].add(prob * d * d);
    });
  });
  CompensatedSum var;
  for (const auto& part : second) var.add(part);
  out.variance = std::max(0.0, var.value());
  return out;
}

void check_inputs(const Population& pop, const PerturbedPair& pair, std::uint64_t m) {
  if (pop.size() != pair.size()) {
    throw std::invalid_argument("population and distribution pair differ in size");
  }
  if (!pair.nominal.all_positive()) throw std::invalid_argument("zero nominal probability entry");
  if (m == 0) throw std::invalid_argument("sample size m must be at least 1");
  outcome_count_or_throw(pop.size(), m);
}

}  // namespace

ExactMoments exact_estimator_moments(const Population& pop, const PerturbedPair& pair,
                                     std::uint64_t m, unsigned k, double w, unsigned threads) {
  check_inputs(pop, pair, m);
  if (k == 0 || k > m || k > kMaxOrder) {
    throw std::invalid_argument("estimator order must satisfy 1 <= k <= min(m, 32)");
  }
  ContributionTable table(pop.size(), std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double xbar = pop[i] - pair.nominal[i] * w;
    for (std::uint64_t y = 1; y <= m; ++y) {
      CompensatedSum g;
      for (unsigned h = 1; h <= k; ++h) {
        const double sign = (h % 2 == 1) ? 1.0 : -1.0;
        g.add(sign * binomial(k, h) * collision_term(y, h, m, pair.nominal[i], xbar));
      }
      table[i][y] = g.value();
    }
  }
  return enumerate(table, pair.true_dist, m, w, threads);
}

ExactMoments exact_xi_moments(const Population& pop, const PerturbedPair& pair, std::uint64_t m,
                              unsigned h, double w, unsigned threads) {
  check_inputs(pop, pair, m);
  if (h == 0 || h > m) throw std::invalid_argument("collision order must satisfy 1 <= h <= m");
  ContributionTable table(pop.size(), std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double xbar = pop[i] - pair.nominal[i] * w;
    for (std::uint64_t y = 1; y <= m; ++y) {
      table[i][y] = collision_term(y, h, m, pair.nominal[i], xbar);
    }
  }
  return enumerate(table, pair.true_dist, m, 0.0, threads);
}

}  // namespace noisysum
