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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "filterddp/benchmarks.hpp"
#include "filterddp/ocp.hpp"
#include "filterddp/solver.hpp"

namespace filterddp {

/// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Everything a run needs, after flags, config file and overrides merge.
struct RunManifest {
  std::string command;  // "solve" or "check"
  std::string problem;
  std::optional<std::uint64_t> seed;
  int batch = 1;
  int threads = 0;  // 0: one per hardware thread
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> config_file;
  std::vector<std::pair<std::string, std::string>> settings;  // in order
};

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
/// Throws InputError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text);

/**
 * Applies one setting. Solver keys use the SolverConfig field names
 * (eps_tol, max_iters, ...); problem keys are N, dt, seed and
 * param.<name> for any parameter of the benchmark. Unknown keys and
 * unparsable values throw InputError naming the key.
 */
void apply_setting(const std::string& key, const std::string& value,
                   SolverConfig& config, BenchmarkSpec& spec);

/// Every key apply_setting accepts for `spec`, sorted.
std::vector<std::string> known_keys(const BenchmarkSpec& spec);

/// Iteration log as CSV. Columns: k, mode, mu, cost, theta, lagrangian,
/// error, gamma, delta_w, m, l_type, filter_size, trials.
std::string iteration_log_csv(const SolverReport& report);

/// One row per stage: t, x*, u*, phi*, lambda*, z*.
std::string trajectory_csv(const Iterate& w);

struct CheckResult {
  double derivative_error = 0.0;
  std::optional<double> oracle_gap;  // LQ problems only
  bool passed = false;
};

/**
 * Derivative check at `points` random trajectories (masked controls kept
 * positive) and, when the model is an LqModel, the gap between the solver
 * and the stacked KKT oracle.
 */
CheckResult check_model(const OcpModel& model, const SolverConfig& config,
                        std::uint64_t seed, int points = 5,
                        double derivative_tol = 1e-5, double oracle_tol = 1e-8);

/// Merges config file and overrides into (config, specs), runs the command
/// and returns an exit code. Diagnostics go to `err`.
int run_manifest(const RunManifest& manifest, std::ostream& out,
                 std::ostream& err);

/// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace filterddp
