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

#include <optional>
#include <vector>

#include "filterddp/linalg.hpp"
#include "filterddp/ocp.hpp"

namespace filterddp {

/// Barrier data for one stage in interior-point mode.
struct StageBarrier {
  double mu = 0.0;
  std::vector<int> bounded;  // masked control indices
  VectorXd u;                // current controls
  VectorXd z;                // current bound duals
};

/// Quadratic model of the stage Q-function.
struct StageQ {
  VectorXd Qu;      // L_u + f_u^T Vx'
  VectorXd Qu_hat;  // Qu - mu / u on masked components (equals Qu otherwise)
  VectorXd Qx;      // L_x + f_x^T Vx'
  MatrixXd H;       // nu x nu
  MatrixXd B;       // nu x nx
  MatrixXd C;       // nx x nx
  MatrixXd A;       // nu x nc, transpose of c_u
  VectorXd c;       // nc
  MatrixXd cx;      // nc x nx
  VectorXd sigma;   // diagonal of U^-1 Z (zeros when not interior)
};

/// Value-function data flowing backwards from stage t+1 to t.
struct ValueState {
  VectorXd Vx;
  MatrixXd Vxx;
  VectorXd lambda;

  static ValueState zero(int nx);
};

/// Feedforward/feedback terms of the forward-pass update rule.
struct StageGains {
  VectorXd alpha;  // nu
  MatrixXd beta;   // nu x nx
  VectorXd psi;    // nc
  MatrixXd omega;  // nc x nx
  VectorXd chi;    // nu, bound-dual feedforward (zero unless interior)
  MatrixXd zeta;   // nu x nx
};

using GainsTrajectory = std::vector<StageGains>;

/// Inertia-correction schedule. Defaults follow the usual interior-point
/// settings: first shift 1e-4, warm start at a third of the last shift,
/// growth by 8.
struct RegularizationConfig {
  double delta_w_init = 1e-4;
  double delta_w_min = 1e-20;
  double delta_w_max = 1e40;
  double decrease_factor = 1.0 / 3.0;
  double increase_factor = 8.0;
  double delta_c_base = 1e-8;
  double delta_c_exponent = 0.25;
  double zero_pivot_tol = kDefaultZeroPivotTol;
  double max_condition = 1e14;
};

struct RegState {
  double delta_w = 0.0;
  double delta_w_last = 0.0;
  double delta_c = 0.0;
};

/**
 * Assembles the stage Q-function derivatives. Second-order dynamics terms are
 * contracted with lambda' rather than Vx', and dropped entirely when
 * `gauss_newton` is set or the model omits them.
 */
StageQ assemble_stage_q(const StageDerivatives& stage, const ValueState& next,
                        const std::optional<StageBarrier>& barrier,
                        bool gauss_newton = false);

/// [[H + Sigma + dw I, A], [A^T, -dc I]].
MatrixXd stage_kkt_matrix(const StageQ& q, double delta_w, double delta_c);

struct CorrectedFactor {
  SymIndefFactor factor;
  RegState reg;
};

/**
 * Factors the stage KKT matrix, adding primal/dual shifts until the inertia is
 * (nu, nc, 0). `mu_or_tol` feeds the dual shift rule
 * delta_c = base * mu_or_tol^exponent.
 *
 * Throws RegularizationOverflow when the primal shift exceeds its maximum.
 */
CorrectedFactor inertia_correct(const StageQ& q, RegState reg,
                                const RegularizationConfig& config,
                                double mu_or_tol);

/// Solves the stage system for (alpha, beta, psi, omega); also chi and zeta
/// when a barrier is present.
StageGains solve_stage_kkt(const StageQ& q, const SymIndefFactor& factor,
                           const std::optional<StageBarrier>& barrier);

/**
 * Value recursion. Vx = Qx + beta^T Qu_hat + omega^T c,
 * lambda = L_x + f_x^T lambda', Vxx = C + beta^T (H + Sigma) beta
 * + B^T beta + beta^T B (symmetrized).
 */
ValueState update_value(const StageQ& q, const StageGains& gains,
                        const StageDerivatives& stage, const ValueState& next);

/// Interior-point data for a whole backward pass.
struct BarrierMode {
  double mu = 0.0;
  std::vector<int> bounded;
};

struct BackwardPassResult {
  GainsTrajectory gains;
  double expected_decrease = 0.0;  // m
  RegState reg;
  double max_delta_w = 0.0;        // largest primal shift over the stages
  double max_condition = 0.0;      // worst pivot ratio over the stages
};

/**
 * Runs stages N-1..0, refreshing iterate.lambda in place.
 *
 * `delta_c_scale` is max(mu, eps_tol) for the dual shift rule. Throws
 * RegularizationOverflow or IllConditioned.
 */
BackwardPassResult backward_pass(const OcpModel& model, Iterate& iterate,
                                 RegState reg,
                                 const std::optional<BarrierMode>& barrier,
                                 const RegularizationConfig& config,
                                 double delta_c_scale,
                                 bool gauss_newton = false);

}  // namespace filterddp
