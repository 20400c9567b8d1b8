// Copyright 2026 The FilterDDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "filterddp/cli.hpp"
#include "toy_models.hpp"

namespace fd = filterddp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "filterddp");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  const int code =
      fd::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    dir_ = fs::temp_directory_path() /
           ("filterddp_cli_" + std::to_string(stamp));
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveWritesLogs) {
  const CliRun r = run({"solve", "--problem", "eqlq", "--seed", "1", "--out",
                        dir_.string()});
  EXPECT_EQ(r.code, fd::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run_000_log.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run_000_traj.csv"));
  EXPECT_NE(r.out.find("converged"), std::string::npos);
}

TEST_F(CliTest, BadValueNamesKey) {
  const CliRun r = run({"solve", "--problem", "eqlq", "--set", "eps_tol=abc",
                        "--out", dir_.string()});
  EXPECT_EQ(r.code, fd::kExitUsage);
  EXPECT_NE(r.err.find("eps_tol"), std::string::npos);
}

TEST_F(CliTest, UnknownKeyIsUsageError) {
  const CliRun r = run({"solve", "--problem", "eqlq", "--set", "bogus=1",
                        "--out", dir_.string()});
  EXPECT_EQ(r.code, fd::kExitUsage);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST_F(CliTest, ConfigFileSuppliesProblem) {
  fs::create_directories(dir_);
  const fs::path cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# batch of two\nproblem = eqlq\nbatch = 2\n"
                        "max_iters = 50\n";
  const CliRun r = run({"solve", "--config", cfg.string(), "--out",
                        (dir_ / "out").string()});
  EXPECT_EQ(r.code, fd::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "run_001_log.csv"));
}

TEST(Cli, CheckReportsOracleGap) {
  const CliRun r = run({"check", "--problem", "eqlq"});
  EXPECT_EQ(r.code, fd::kExitOk) << r.err;
  EXPECT_NE(r.out.find("oracle_gap"), std::string::npos);
}

TEST(Cli, EmptyManifestIsUsageError) {
  std::ostringstream out, err;
  EXPECT_EQ(fd::run_manifest(fd::RunManifest{}, out, err), fd::kExitUsage);
}

TEST(Cli, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, fd::kExitUsage);
}

TEST(Cli, UnknownProblemIsUsageError) {
  EXPECT_EQ(run({"check", "--problem", "nope"}).code, fd::kExitUsage);
}

TEST(CheckModel, CorruptedDerivativeFails) {
  const auto base = fd::build_eqlq(3, 4, 2, 2, 1);
  const fd::testing::CorruptedLq model(*base, 0.1);
  const fd::CheckResult r = fd::check_model(model, {}, 3);
  EXPECT_FALSE(r.passed);
  EXPECT_GE(r.derivative_error, 0.01);
}

TEST(CheckModel, OracleGapOnLq) {
  const fd::CheckResult r = fd::check_model(*fd::build_eqlq(3, 4, 2, 2, 1), {}, 3);
  EXPECT_TRUE(r.passed);
  ASSERT_TRUE(r.oracle_gap.has_value());
  EXPECT_LE(*r.oracle_gap, 1e-8);
}

TEST(ParseKeyValues, CommentsAndWhitespace) {
  const auto kv = fd::parse_key_values("# c\n a = 1 \n\nb=two # tail\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], std::make_pair(std::string("a"), std::string("1")));
  EXPECT_EQ(kv[1], std::make_pair(std::string("b"), std::string("two")));
  EXPECT_THROW(fd::parse_key_values("novalue\n"), fd::InputError);
  EXPECT_THROW(fd::parse_key_values("= 3\n"), fd::InputError);
}

TEST(ApplySetting, SolverAndProblemKeys) {
  fd::SolverConfig config;
  fd::BenchmarkSpec spec = fd::default_spec("pendulum");
  fd::apply_setting("eps_tol", "1e-9", config, spec);
  fd::apply_setting("N", "40", config, spec);
  fd::apply_setting("param.mass", "2.5", config, spec);
  EXPECT_EQ(config.eps_tol, 1e-9);
  EXPECT_EQ(spec.N, 40);
  EXPECT_EQ(spec.param("mass"), 2.5);
  EXPECT_THROW(fd::apply_setting("param.nope", "1", config, spec),
               fd::InputError);
  EXPECT_THROW(fd::apply_setting("max_iters", "1.5", config, spec),
               fd::InputError);
}

TEST(IterationLogCsv, OneRowPerRecord) {
  const auto model = fd::build_eqlq(1, 5, 2, 2, 1);
  const fd::SolverReport r =
      fd::solve(*model, fd::Trajectory(5, Eigen::VectorXd::Zero(2)));
  const std::string csv = fd::iteration_log_csv(r);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(lines, static_cast<long>(r.records.size()) + 1);
}
