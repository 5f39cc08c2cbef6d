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

#include "noisysum/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace noisysum {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(where + ": cannot parse number '" + text + "'");
  }
  return value;
}

std::uint64_t parse_index(const std::string& text, const std::string& where) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value == 0) {
    throw ParseError(where + ": invalid 1-based index '" + text + "'");
  }
  return value;
}

struct Row {
  double x = 0.0;
  std::optional<double> p;
  std::optional<double> q;
};

// Orders rows by 1-based index and rejects gaps and duplicates.
PopulationFile assemble(std::map<std::uint64_t, Row> rows, std::size_t row_count) {
  if (rows.empty()) throw ParseError("population file has no rows");
  if (rows.size() != row_count) throw ParseError("duplicate index in population file");
  if (rows.rbegin()->first != rows.size()) {
    throw ParseError("population indices must be exactly 1.." + std::to_string(rows.size()) +
                     "; index " + std::to_string(rows.rbegin()->first) + " present");
  }
  const bool has_p = rows.begin()->second.p.has_value();
  const bool has_q = rows.begin()->second.q.has_value();
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> q;
  for (const auto& [index, row] : rows) {
    if (row.p.has_value() != has_p || row.q.has_value() != has_q) {
      throw ParseError("row " + std::to_string(index) + ": p/q columns must be all-or-none");
    }
    x.push_back(row.x);
    if (has_p) p.push_back(*row.p);
    if (has_q) q.push_back(*row.q);
  }
  try {
    const std::size_t n = x.size();
    PopulationFile file{Population(std::move(x)),
                        has_p ? Distribution(std::move(p)) : Distribution::uniform(n),
                        std::nullopt};
    if (has_q) file.true_dist = Distribution(std::move(q));
    return file;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

PopulationFile parse_population_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("population CSV is empty");
  const auto header = split_csv_line(line);
  int col_index = -1;
  int col_x = -1;
  int col_p = -1;
  int col_q = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    int* slot = name == "index" ? &col_index
                : name == "x"   ? &col_x
                : name == "p"   ? &col_p
                : name == "q"   ? &col_q
                                : nullptr;
    if (slot == nullptr) throw ParseError("unknown CSV column '" + name + "'");
    if (*slot != -1) throw ParseError("duplicate CSV column '" + name + "'");
    *slot = static_cast<int>(c);
  }
  if (col_index < 0 || col_x < 0) throw ParseError("CSV header must contain index and x");

  std::map<std::uint64_t, Row> rows;
  std::size_t row_count = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
    }
    Row row;
    row.x = parse_double(fields[col_x], where);
    if (col_p >= 0) row.p = parse_double(fields[col_p], where);
    if (col_q >= 0) row.q = parse_double(fields[col_q], where);
    rows[parse_index(fields[col_index], where)] = row;
    ++row_count;
  }
  return assemble(std::move(rows), row_count);
}

PopulationFile parse_population_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("population JSON must be an array of objects");
  std::map<std::uint64_t, Row> rows;
  std::uint64_t position = 0;
  try {
    for (const auto& item : doc) {
      ++position;
      if (!item.is_object() || !item.contains("x")) {
        throw ParseError("entry " + std::to_string(position) + " lacks field x");
      }
      Row row;
      row.x = item.at("x").get<double>();
      if (item.contains("p")) row.p = item.at("p").get<double>();
      if (item.contains("q")) row.q = item.at("q").get<double>();
      const std::uint64_t index =
          item.contains("index") ? item.at("index").get<std::uint64_t>() : position;
      if (index == 0) throw ParseError("indices are 1-based");
      rows[index] = row;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid population entry: ") + e.what());
  }
  return assemble(std::move(rows), position);
}

PopulationFile read_population_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  if (path.extension() == ".json") return parse_population_json(in);
  return parse_population_csv(in);
}

std::vector<std::size_t> read_sample_indices(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::size_t> indices;
  std::string token;
  char c;
  auto flush = [&] {
    if (token.empty()) return;
    const auto idx = parse_index(token, path.string());
    if (idx > n) {
      throw ParseError(path.string() + ": index " + token + " outside [1, " + std::to_string(n) +
                       "]");
    }
    indices.push_back(static_cast<std::size_t>(idx - 1));
    token.clear();
  };
  while (in.get(c)) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return indices;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

nlohmann::json to_json(const EstimatorReport& report) {
  return nlohmann::json{{"estimate", report.estimate}, {"k", report.k},
                        {"m", report.m},               {"t", report.t},
                        {"pilot_W", report.pilot_w},   {"xi_values", report.xi_values},
                        {"seed", report.seed}};
}

nlohmann::json to_json(const ExactMoments& moments) {
  return nlohmann::json{{"expectation", moments.expectation},
                        {"variance", moments.variance},
                        {"outcome_count", moments.outcome_count},
                        {"total_prob", moments.total_prob}};
}

nlohmann::json to_json(const TrialStats& stats) {
  return nlohmann::json{{"mu", stats.mu},
                        {"empirical_mean", stats.empirical_mean},
                        {"empirical_variance", stats.empirical_variance},
                        {"success_rate", stats.success_rate},
                        {"budget", stats.budget},
                        {"q50", stats.q50},
                        {"q90", stats.q90},
                        {"q99", stats.q99},
                        {"samples_per_trial", stats.samples_per_trial},
                        {"trials", stats.trials}};
}

namespace {

nlohmann::json big_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() &&
      v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

}  // namespace

nlohmann::json spectrum_to_json(const MassSpectrum& spectrum) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : spectrum.levels) {
    levels.push_back({{"i", level.i},
                      {"prob_num", big_to_json(numerator(level.prob))},
                      {"prob_den", big_to_json(denominator(level.prob))},
                      {"count_num", big_to_json(numerator(level.count))},
                      {"count_den", big_to_json(denominator(level.count))}});
  }
  return nlohmann::json{{"n0", spectrum.n0}, {"levels", levels}};
}

std::string to_csv_line(const TrialCsvRow& row) {
  std::ostringstream out;
  out << row.exp << ',' << row.n << ',' << format_double(row.gamma) << ','
      << format_double(row.eps1) << ',' << format_double(row.eps2) << ',' << row.plan.k << ','
      << row.plan.m << ',' << row.plan.t << ',' << row.stats.trials << ',' << row.seed << ','
      << format_double(row.stats.empirical_mean) << ','
      << format_double(row.stats.empirical_variance) << ',' << format_double(row.stats.q50)
      << ',' << format_double(row.stats.q90) << ',' << format_double(row.stats.q99) << ','
      << format_double(row.stats.success_rate);
  return out.str();
}

nlohmann::json to_json(const TrialCsvRow& row) {
  return nlohmann::json{{"exp", row.exp},
                        {"n", row.n},
                        {"gamma", row.gamma},
                        {"eps1", row.eps1},
                        {"eps2", row.eps2},
                        {"k", row.plan.k},
                        {"m", row.plan.m},
                        {"t", row.plan.t},
                        {"T", row.stats.trials},
                        {"seed", row.seed},
                        {"mean", row.stats.empirical_mean},
                        {"var", row.stats.empirical_variance},
                        {"q50", row.stats.q50},
                        {"q90", row.stats.q90},
                        {"q99", row.stats.q99},
                        {"success_rate", row.stats.success_rate}};
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace noisysum
