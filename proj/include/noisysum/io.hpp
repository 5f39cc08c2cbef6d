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

// File formats.
//
// Population input, CSV:   index,x[,p][,q]   (1-based indices, any row order)
// Population input, JSON:  [{"x": ..., "p": ..., "q": ...}, ...]
//                          (optional "index"; p and q optional but all-or-none)
// When p is absent the nominal distribution is uniform. A q column supplies
// the true sampling distribution for simulation.
//
// Sample files hold 1-based indices separated by whitespace or commas.

#ifndef NOISYSUM_IO_HPP
#define NOISYSUM_IO_HPP

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisysum/estimators.hpp"
#include "noisysum/exact_oracle.hpp"
#include "noisysum/experiments.hpp"
#include "noisysum/model.hpp"
#include "noisysum/moment_matched.hpp"

namespace noisysum {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PopulationFile {
  Population population;
  Distribution nominal;
  std::optional<Distribution> true_dist;
};

PopulationFile parse_population_csv(std::istream& in);
PopulationFile parse_population_json(std::istream& in);
/// Dispatches on extension: ".json" is JSON, anything else CSV.
PopulationFile read_population_file(const std::filesystem::path& path);

/// Returns 0-based indices; every index must lie in [1, n].
std::vector<std::size_t> read_sample_indices(const std::filesystem::path& path, std::size_t n);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

nlohmann::json to_json(const EstimatorReport& report);
nlohmann::json to_json(const ExactMoments& moments);
nlohmann::json to_json(const TrialStats& stats);
/// {n0, levels: [{i, prob_num, prob_den, count_num, count_den}]}. Integers
/// beyond 64 bits are written as decimal strings.
nlohmann::json spectrum_to_json(const MassSpectrum& spectrum);

/// Column order of experiment CSV rows.
inline constexpr const char* kTrialCsvHeader =
    "exp,n,gamma,eps1,eps2,k,m,t,T,seed,mean,var,q50,q90,q99,success_rate";

struct TrialCsvRow {
  std::string exp;
  std::uint64_t n = 0;
  double gamma = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  PlanParameters plan;
  std::uint64_t seed = 0;
  TrialStats stats;
};

std::string to_csv_line(const TrialCsvRow& row);
nlohmann::json to_json(const TrialCsvRow& row);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so a failed run never leaves a partial file behind.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace noisysum

#endif  // NOISYSUM_IO_HPP
