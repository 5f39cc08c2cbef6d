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

#include "noisysum/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace noisysum {
namespace {

const std::string kData = NOISYSUM_TEST_DATA;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "noisysum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           (std::string("noisysum_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST(CliTest, IdentitiesReportsTinyResidual) {
  const auto r = run({"identities", "--kmax", "20"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["max_residual"].get<double>(), 1e-9);
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(CliTest, LowerBoundExample) {
  const auto r = run({"lowerbound", "--k", "2", "--gamma", "0.5", "--n0", "60"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["gap"], "2");
  EXPECT_EQ(j["n1"], "50");
  EXPECT_EQ(j["n2"], "48");
  for (int ell = 0; ell < 2; ++ell) {
    EXPECT_EQ(j["moments"][ell]["d1"], j["moments"][ell]["d2"]);
  }
  EXPECT_NE(j["moments"][2]["d1"], j["moments"][2]["d2"]);

  const auto table = run({"lowerbound", "--k", "2", "--gamma", "1/2", "--n0", "60", "--format", "csv"});
  EXPECT_EQ(table.out, "ell,d1,d2,equal\n1,1,1,1\n2,1/48,1/48,1\n3,13/28800,1/2304,0\n");
}

TEST(CliTest, OracleHansenHurwitzVariance) {
  const auto r = run({"oracle", "--n", "2", "--m", "2", "--x", "1,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["variance"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["expectation"].get<double>(), 1.0, 1e-12);

  const auto xi = run({"oracle", "--x", "1,0", "--deviations", "0.5,-0.5", "--m", "2", "--h", "2"});
  ASSERT_EQ(xi.code, kExitOk) << xi.err;
  EXPECT_NEAR(nlohmann::json::parse(xi.out)["expectation"].get<double>(), 2.25, 1e-12);

  const auto file = run({"oracle", "--input", kData + "/saturating.csv", "--m", "3", "--k", "2"});
  ASSERT_EQ(file.code, kExitOk) << file.err;
  EXPECT_NEAR(nlohmann::json::parse(file.out)["expectation"].get<double>(), 1.5, 1e-12);
}

TEST(CliTest, OracleBudgetAndUsageErrors) {
  EXPECT_EQ(run({"oracle", "--x", "1,2,3,4,5,6,7,8,9,10", "--m", "8"}).code, kExitInfeasible);
  EXPECT_EQ(run({"oracle", "--n", "3", "--x", "1,0", "--m", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"oracle", "--m", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"oracle", "--x", "1,0", "--m", "2", "--k", "3"}).code, kExitUsage);
}

TEST(CliTest, EstimateZeroPopulation) {
  const auto r = run({"estimate", "--input", kData + "/zeros.csv", "--samples", kData + "/samples.txt",
                      "--k", "2", "--m", "3", "--t", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["estimate"].get<double>(), 0.0);
}

TEST(CliTest, EstimateGoldenPointMass) {
  // x = (1, 0, ..., 0) over 20 uniform points with q = p; Var_HH = 19.
  const auto r = run({"estimate", "--input", kData + "/point_mass.csv", "--k", "1", "--m", "10000",
                      "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const double estimate = j["estimate"].get<double>();
  EXPECT_EQ(estimate, 0.976);
  EXPECT_LE(std::abs(estimate - 1.0), 5.0 * std::sqrt(19.0 / 10000.0));
  EXPECT_EQ(j["seed"].get<int>(), 7);
}

TEST(CliTest, EstimatePlansFromTargets) {
  const auto r = run({"estimate", "--input", kData + "/saturating.csv", "--gamma", "0.5", "--eps1",
                      "0.25", "--eps2", "0.1", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["k"].get<int>(), 2);
  EXPECT_EQ(j["t"].get<int>(), 16);
  EXPECT_DOUBLE_EQ(j["estimate"].get<double>(), 2.0);
}

TEST(CliTest, EstimateJsonInputAndSingleStage) {
  const auto r = run({"estimate", "--input", kData + "/two.json", "--samples", kData + "/samples.txt",
                      "--k", "1", "--m", "4", "--t", "0", "--w", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  // First four samples 1 2 2 1 give (2 + 0 + 0 + 2) / 4.
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["estimate"].get<double>(), 1.0);
  EXPECT_EQ(run({"estimate", "--input", kData + "/two.json", "--samples", kData + "/samples.txt",
                 "--k", "1", "--m", "4", "--t", "0"}).code,
            kExitUsage);
}

TEST(CliTest, EstimateWithoutSamplerNamesBothOptions) {
  const auto r = run({"estimate", "--input", kData + "/zeros.csv", "--k", "1", "--m", "3"});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_NE(r.err.find("q column"), std::string::npos);
  EXPECT_NE(r.err.find("--samples"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliTest, EstimateErrors) {
  EXPECT_EQ(run({"estimate", "--input", kData + "/zeros.csv", "--samples", kData + "/samples.txt"}).code,
            kExitUsage);
  EXPECT_EQ(run({"estimate", "--input", kData + "/zeros.csv", "--samples", kData + "/samples.txt",
                 "--k", "1", "--m", "30"}).code,
            kExitInfeasible);
  EXPECT_EQ(run({"estimate", "--input", kData + "/nope.csv", "--k", "1", "--m", "3"}).code, kExitUsage);
  EXPECT_EQ(run({"estimate", "--input", kData + "/saturating.csv", "--gamma", "0.99", "--eps1", "1e-12",
                 "--eps2", "1"}).code,
            kExitInfeasible);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"identities", "--kmax", "40"}).code, kExitUsage);
  EXPECT_EQ(run({"identities", "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(run({"lowerbound", "--k", "2", "--gamma", "3/4", "--n0", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"lowerbound", "--k", "2", "--gamma", "x", "--n0", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--experiment", "zero-one", "--gamma", "0.5"}).code, kExitUsage);
  EXPECT_EQ(run({"identities", "--help"}).code, kExitOk);
}

TEST(CliTest, SimulateZeroOneCsv) {
  const auto r = run({"simulate", "--experiment", "zero-one", "--n", "1000", "--gamma", "0.5", "--eps",
                      "0.25", "--trials", "50", "--seed", "4", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::string row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "exp,n,gamma,eps1,eps2,k,m,t,T,seed,mean,var,q50,q90,q99,success_rate");
  EXPECT_EQ(row.rfind("zero-one,1000,0.5,0.25,", 0), 0u);
}

TEST(CliTest, SimulateBiasDecayDefaultInstance) {
  const auto r = run({"simulate", "--experiment", "bias-decay", "--gamma", "0.5", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out,
            "k,exact_bias,bound,ratio\n1,1,1,1\n2,0.5,0.5,1\n3,0.25,0.25,1\n4,0.125,0.125,1\n"
            "5,0.0625,0.0625,1\n6,0.03125,0.03125,1\n");
}

TEST(CliTest, SimulateTrialsAgainstFile) {
  const auto r = run({"simulate", "--experiment", "trials", "--input", kData + "/saturating.csv", "--k",
                      "2", "--m", "50", "--t", "0", "--trials", "2000", "--budget", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["mean"].get<double>(), 1.5, 0.05);
  EXPECT_EQ(j["T"].get<int>(), 2000);
}

TEST(CliTest, SimulateDistinguishNull) {
  const auto r = run({"simulate", "--experiment", "distinguish", "--lb-k", "1", "--lb-gamma", "1/2",
                      "--n0", "60", "--m-list", "4,16", "--trials", "100", "--null", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("m,mean_a,mean_b,var_a,var_b,separation_z\n4,", 0), 0u);
}

TEST_F(CliFiles, OutputIsByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::vector<std::string>> commands = {
      {"identities", "--kmax", "12", "--seed", "3"},
      {"lowerbound", "--k", "3", "--gamma", "1/4", "--n0", "1000"},
      {"oracle", "--x", "1,2,3", "--deviations", "0.2,-0.1,-0.1", "--m", "6", "--k", "3", "--w", "1"},
      {"estimate", "--input", kData + "/saturating.csv", "--k", "2", "--m", "40", "--t", "5", "--seed", "8"},
      {"simulate", "--experiment", "zero-one", "--n", "2000", "--gamma", "0.5", "--eps", "0.25",
       "--trials", "64", "--seed", "2"},
      {"simulate", "--experiment", "distinguish", "--n0", "120", "--m-list", "4,8", "--trials", "40"},
  };
  int id = 0;
  for (const auto& base : commands) {
    std::string first;
    for (const char* threads : {"1", "8", "1", "8"}) {
      auto args = base;
      const std::string out = path("run" + std::to_string(id++) + ".out");
      args.insert(args.end(), {"--threads", threads, "--output", out});
      const auto r = run(args);
      ASSERT_EQ(r.code, kExitOk) << base.front() << ": " << r.err;
      EXPECT_TRUE(r.out.empty());
      const std::string text = slurp(out);
      if (first.empty()) {
        first = text;
      } else {
        EXPECT_EQ(text, first) << base.front();
      }
    }
  }
}

TEST_F(CliFiles, FailedRunLeavesNoFile) {
  const std::string out = path("never.json");
  EXPECT_EQ(run({"estimate", "--input", kData + "/zeros.csv", "--k", "1", "--m", "3", "--output", out}).code,
            kExitInfeasible);
  EXPECT_FALSE(std::filesystem::exists(out));
  EXPECT_FALSE(std::filesystem::exists(out + ".tmp"));
}

TEST(CliTest, ThreadsEnvironmentFallback) {
  ::setenv("NOISYSUM_THREADS", "bogus", 1);
  const auto bad = run({"oracle", "--x", "1,0", "--m", "2"});
  ::setenv("NOISYSUM_THREADS", "4", 1);
  const auto good = run({"oracle", "--x", "1,0", "--m", "2"});
  ::unsetenv("NOISYSUM_THREADS");
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_EQ(good.code, kExitOk);
}

TEST(CliBinaryTest, ExitCodesFromProcess) {
  const std::string cli = NOISYSUM_CLI_PATH;
  EXPECT_EQ(std::system((cli + " identities --kmax 5 > /dev/null").c_str()), 0);
  const int status = std::system((cli + " oracle --m 2 > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(status), kExitUsage);
}

}  // namespace
}  // namespace noisysum
