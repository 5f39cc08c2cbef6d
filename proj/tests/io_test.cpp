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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace noisysum {
namespace {

PopulationFile csv(const std::string& text) {
  std::istringstream in(text);
  return parse_population_csv(in);
}

PopulationFile json(const std::string& text) {
  std::istringstream in(text);
  return parse_population_json(in);
}

TEST(PopulationCsvTest, UniformWhenNoP) {
  const auto f = csv("index,x\n2,5\n1,3\n3,-1\n");
  ASSERT_EQ(f.population.size(), 3u);
  EXPECT_EQ(f.population[0], 3.0);
  EXPECT_EQ(f.population[1], 5.0);
  EXPECT_DOUBLE_EQ(f.nominal[2], 1.0 / 3.0);
  EXPECT_FALSE(f.true_dist.has_value());
}

TEST(PopulationCsvTest, ReadsPAndQ) {
  const auto f = csv("x,index,p,q\n1,1,0.5,0.75\n1,2,0.5,0.25\n\n");
  EXPECT_EQ(f.nominal[0], 0.5);
  ASSERT_TRUE(f.true_dist.has_value());
  EXPECT_EQ((*f.true_dist)[1], 0.25);
}

TEST(PopulationCsvTest, Rejections) {
  EXPECT_THROW(csv(""), ParseError);
  EXPECT_THROW(csv("index,x\n1,1\n1,2\n"), ParseError);
  EXPECT_THROW(csv("index,x\n1,1\n3,2\n"), ParseError);
  EXPECT_THROW(csv("index,x\n0,1\n"), ParseError);
  EXPECT_THROW(csv("index,y\n1,1\n"), ParseError);
  EXPECT_THROW(csv("index,x\n1,abc\n"), ParseError);
  EXPECT_THROW(csv("index,x\n1\n"), ParseError);
  EXPECT_THROW(csv("index,x,p\n1,1,0.5\n2,1,0.4\n"), ParseError);
  EXPECT_THROW(csv("index,x,x\n1,1,1\n"), ParseError);
}

TEST(PopulationJsonTest, ArrayForm) {
  const auto f = json(R"([{"x": 1, "p": 0.25}, {"x": 2, "p": 0.75}])");
  EXPECT_EQ(f.population[1], 2.0);
  EXPECT_EQ(f.nominal[0], 0.25);

  const auto g = json(R"([{"index": 2, "x": 9}, {"index": 1, "x": 4}])");
  EXPECT_EQ(g.population[0], 4.0);
  EXPECT_EQ(g.nominal[0], 0.5);
}

TEST(PopulationJsonTest, Rejections) {
  EXPECT_THROW(json("{"), ParseError);
  EXPECT_THROW(json(R"({"x": 1})"), ParseError);
  EXPECT_THROW(json(R"([{"p": 1}])"), ParseError);
  EXPECT_THROW(json(R"([{"x": "a"}])"), ParseError);
  EXPECT_THROW(json(R"([{"index": 1, "x": 1}, {"index": 1, "x": 2}])"), ParseError);
  EXPECT_THROW(json(R"([{"x": 1, "p": 0.5}, {"x": 2}])"), ParseError);
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("noisysum_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

using FileIoTest = TempDir;

TEST_F(FileIoTest, SampleIndicesAreOneBased) {
  const auto path = dir_ / "s.txt";
  std::ofstream(path) << "1 2\n3,1\n";
  EXPECT_EQ(read_sample_indices(path, 3), (std::vector<std::size_t>{0, 1, 2, 0}));
  EXPECT_THROW(read_sample_indices(path, 2), ParseError);
  std::ofstream(path) << "1 0\n";
  EXPECT_THROW(read_sample_indices(path, 2), ParseError);
  EXPECT_THROW(read_sample_indices(dir_ / "missing.txt", 2), ParseError);
}

TEST_F(FileIoTest, DispatchesOnExtension) {
  std::ofstream(dir_ / "pop.json") << R"([{"x": 1}, {"x": 3}])";
  std::ofstream(dir_ / "pop.csv") << "index,x\n1,1\n2,3\n";
  EXPECT_EQ(read_population_file(dir_ / "pop.json").population.sum(), 4.0);
  EXPECT_EQ(read_population_file(dir_ / "pop.csv").population.sum(), 4.0);
}

TEST_F(FileIoTest, AtomicWriteLeavesNoTemporary) {
  const auto path = dir_ / "out.json";
  write_file_atomically(path, "abc\n");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, "abc\n");
  EXPECT_FALSE(std::filesystem::exists(dir_ / "out.json.tmp"));
  EXPECT_THROW(write_file_atomically(dir_ / "no" / "such" / "dir.json", "x"), std::runtime_error);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(SerializationTest, EstimatorReportFields) {
  EstimatorReport r;
  r.estimate = 1.5;
  r.k = 2;
  r.m = 10;
  r.t = 3;
  r.pilot_w = 0.25;
  r.xi_values = {1.0, 0.5};
  r.seed = 7;
  const auto j = to_json(r);
  for (const char* key : {"estimate", "k", "m", "t", "pilot_W", "xi_values", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["pilot_W"].get<double>(), 0.25);
  EXPECT_EQ(j["xi_values"].size(), 2u);
}

TEST(SerializationTest, SpectrumExport) {
  const auto pair = construct_pair(2, Rational(1, 2), 60);
  const auto j = spectrum_to_json(pair.d1);
  EXPECT_EQ(j["n0"].get<int>(), 60);
  ASSERT_EQ(j["levels"].size(), 2u);
  EXPECT_EQ(j["levels"][1]["i"].get<int>(), 2);
  EXPECT_EQ(j["levels"][1]["prob_num"].get<int>(), 1);
  EXPECT_EQ(j["levels"][1]["prob_den"].get<int>(), 40);
  EXPECT_EQ(j["levels"][1]["count_num"].get<int>(), 20);
  EXPECT_EQ(j["levels"][1]["count_den"].get<int>(), 1);
}

TEST(SerializationTest, TrialCsvColumns) {
  TrialCsvRow row;
  row.exp = "zero-one";
  row.n = 4;
  row.gamma = 0.5;
  row.plan.k = 2;
  row.plan.m = 8;
  row.plan.t = 3;
  row.stats.trials = 10;
  row.stats.empirical_mean = 1.25;
  row.stats.success_rate = 0.9;
  EXPECT_EQ(std::string(kTrialCsvHeader),
            "exp,n,gamma,eps1,eps2,k,m,t,T,seed,mean,var,q50,q90,q99,success_rate");
  EXPECT_EQ(to_csv_line(row), "zero-one,4,0.5,0,0,2,8,3,10,0,1.25,0,0,0,0,0.9");
  EXPECT_EQ(to_json(row)["T"].get<int>(), 10);
}

}  // namespace
}  // namespace noisysum
