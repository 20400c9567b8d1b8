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
#include <functional>
#include <string_view>
#include <vector>

#include "filterddp/backward_pass.hpp"
#include "filterddp/barrier.hpp"
#include "filterddp/forward_filter.hpp"
#include "filterddp/ocp.hpp"

namespace filterddp {

struct IterationRecord;

struct SolverConfig {
  double eps_tol = 1e-7;
  int max_iters = 1000;

  double gamma_theta = 1e-5;
  double gamma_lagrangian = 1e-5;
  double delta = 1.0;
  double s_theta = 1.1;
  double s_lagrangian = 2.3;
  double eta = 1e-4;
  double gamma_min = 1e-9;
  double theta_max_factor = 1e4;
  double theta_min_factor = 1e-4;

  double mu_init = 1.0;
  double kappa_eps = 10.0;
  double kappa_mu = 0.2;
  double theta_mu = 1.2;
  double tau_min = 0.99;

  RegularizationConfig regularization;
  bool gauss_newton = false;
  /// Called once per record with the iterate the record describes.
  std::function<void(const IterationRecord&, const Iterate&)> observer;

  /// Throws ContractViolation naming the first parameter out of range.
  void validate() const;

  LineSearchParams line_search_params(double theta_min, double tau) const;
  BarrierConfig barrier_config() const;
};

enum class SolverStatus {
  kConverged,
  kMaxIters,
  kLineSearchFailure,
  kIllConditioned,
  kRegularizationOverflow,
};

std::string_view to_string(SolverStatus status);

/// One outer iteration. `mu` is zero in equality mode; `error` is E there
/// and E_mu in barrier mode. The last record of a run has no step
/// (gamma = 0) unless the run stopped on max_iters.
struct IterationRecord {
  int k = 0;
  bool barrier = false;
  double mu = 0.0;
  double cost = 0.0;
  double theta = 0.0;
  double lagrangian = 0.0;
  double error = 0.0;
  double gamma = 0.0;
  double delta_w = 0.0;
  double m = 0.0;
  bool l_type = false;
  int filter_size = 0;
  int trials = 0;
};

struct SolverReport {
  SolverStatus status = SolverStatus::kMaxIters;
  Iterate solution;
  std::vector<IterationRecord> records;
  double final_error = 0.0;  // E, or the overall test E_0 in barrier mode
  double wall_time = 0.0;    // seconds
  std::string message;

  bool converged() const { return status == SolverStatus::kConverged; }
  /// Number of accepted steps.
  int iterations() const;
};

/**
 * Builds w0 by rolling out `u_init` from the initial state with phi = 0
 * (masked controls lifted to 1e-2, bound duals set to one) and runs the
 * filter line-search method. Problems with a nonnegativity mask are solved
 * through a sequence of barrier subproblems.
 *
 * Numerical failures end the run with a status; only contract violations
 * throw.
 */
SolverReport solve(const OcpModel& model, const Trajectory& u_init,
                   const SolverConfig& config = {});

/// As above but starts from a given iterate. Its states are re-rolled from
/// its controls; masked controls and duals must be strictly positive.
SolverReport solve(const OcpModel& model, const Iterate& start,
                   const SolverConfig& config = {});

struct RateProbeRow {
  double radius = 0.0;
  double before = 0.0;  // ||w_bar - w*||
  double after = 0.0;   // ||w+ - w*|| after one full step
  bool valid = true;    // false when the step diverged or did not contract
};

struct RateProbe {
  std::vector<RateProbeRow> rows;
  double slope = 0.0;  // least-squares slope of log(after) vs log(before)
  int fitted = 0;      // rows entering the fit
};

/**
 * Perturbs the controls of a converged equality-mode solution along one
 * seeded random direction, scaled to each radius, takes one undamped step and
 * reports the error pairs. Errors are Euclidean norms over stacked
 * (x, u, phi).
 */
RateProbe local_rate_probe(const OcpModel& model, const SolverConfig& config,
                           const Iterate& solution,
                           const std::vector<double>& radii,
                           std::uint64_t seed = 0);

/// Euclidean distance between two iterates over stacked (x, u, phi).
double primal_dual_distance(const Iterate& a, const Iterate& b);

/// States obtained by simulating `u` from the model's initial state.
Trajectory simulate(const OcpModel& model, const Trajectory& u);

}  // namespace filterddp
