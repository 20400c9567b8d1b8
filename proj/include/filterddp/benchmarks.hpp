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
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "filterddp/ocp.hpp"

namespace filterddp {

/**
 * Named benchmark instance. `params` holds the physical and weighting
 * constants of the problem; `ranges` the intervals randomize() draws from.
 */
struct BenchmarkSpec {
  std::string name;
  int N = 50;
  double dt = 0.05;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::map<std::string, std::pair<double, double>> ranges;

  /// Throws InputError if the key is missing.
  double param(const std::string& key) const;
};

/// Problems known to default_spec().
std::vector<std::string> benchmark_names();

/// Nominal instance of a named problem. Throws InputError on unknown names.
BenchmarkSpec default_spec(const std::string& name);

/// k specs: the first is `spec` itself, the rest draw every ranged
/// parameter uniformly with seeds spec.seed + 1, ..., spec.seed + k - 1.
std::vector<BenchmarkSpec> randomize(const BenchmarkSpec& spec, int k);

/// A model together with its nominal initial control guess.
struct Problem {
  std::shared_ptr<const OcpModel> model;
  Trajectory u_init;
};

/// Dispatches on spec.name.
Problem make_problem(const BenchmarkSpec& spec);

/// Linear-quadratic problem with linear stage constraints:
///   l_t = 1/2 [x;u]^T W_t [x;u] + q_t^T x + r_t^T u,
///   f_t = A_t x + B_t u + e_t,  c_t = C_t x + D_t u + d_t.
class LqModel : public OcpModel {
 public:
  struct Stage {
    MatrixXd A, B;
    VectorXd e;
    MatrixXd W;  // (nx + nu) square, positive definite
    VectorXd q, r;
    MatrixXd C, D;
    VectorXd d;
  };

  LqModel(Dims dims, VectorXd x_init, std::vector<Stage> stages);

  Dims dims() const override { return dims_; }
  VectorXd initial_state() const override { return x_init_; }
  const Stage& stage(int t) const { return stages_.at(t); }

  double cost(int t, const VectorXd& x, const VectorXd& u) const override;
  VectorXd dynamics(int t, const VectorXd& x, const VectorXd& u) const override;
  VectorXd constraints(int t, const VectorXd& x,
                       const VectorXd& u) const override;
  ScalarDerivatives cost_derivatives(int t, const VectorXd& x,
                                     const VectorXd& u) const override;
  VectorDerivatives dynamics_derivatives(int t, const VectorXd& x,
                                         const VectorXd& u) const override;
  VectorDerivatives constraint_derivatives(int t, const VectorXd& x,
                                           const VectorXd& u) const override;

 private:
  Dims dims_;
  VectorXd x_init_;
  std::vector<Stage> stages_;
};

/**
 * Random LQ instance: strictly convex costs, linear dynamics, constraint
 * Jacobians D_t with smallest singular value >= 0.1. Deterministic in seed.
 */
std::shared_ptr<const LqModel> build_eqlq(std::uint64_t seed, int N, int nx,
                                          int nu, int nc);

/**
 * Solves the first-order conditions of a linear-quadratic problem as a
 * single dense linear system (all states, controls and multipliers stacked).
 * Derivatives are sampled at the origin, so the model must be LQ.
 *
 * Throws SingularityError when the stacked matrix is rank deficient.
 */
Iterate stacked_kkt_oracle(const OcpModel& model);

/**
 * Pendulum in inverse-dynamics form. x = (q, v), u = (tau, q', v'),
 * f(x, u) = (q', v'), and c enforces semi-implicit Euler
 *   q' = q + dt v',  m l^2 (v' - v) = dt (tau - m g l sin q - b v).
 * With param torque_shift > 0 the first control is tau + torque_shift and is
 * masked nonnegative.
 */
std::shared_ptr<const OcpModel> build_pendulum_invdyn(const BenchmarkSpec& spec);

/**
 * Cart-pole swing-up with Coulomb friction on both joints, in variational
 * form. x = (q_{t-1}, q_t), u = (F, q_{t+1}, and per joint b+, b-, psi,
 * eta+, eta-, s). Friction follows maximum dissipation with relaxed
 * complementarity b+ eta+ = b- eta- = psi s = kappa. Param friction = 0
 * drops the contact variables (u = (F, q_{t+1})).
 */
std::shared_ptr<const OcpModel> build_cartpole_friction(
    const BenchmarkSpec& spec);

/**
 * Acrobot swing-up with elbow limits +-limit enforced by impulses.
 * x = (q_{t-1}, q_t), u = (tau, q_{t+1}, l+, l-, s+, s-) with
 * s+ = limit - q2', s- = q2' + limit and l s = kappa. Param contact = 0
 * drops the impulse variables.
 */
std::shared_ptr<const OcpModel> build_acrobot_contact(
    const BenchmarkSpec& spec);

}  // namespace filterddp
