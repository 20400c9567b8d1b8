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

#include <string>
#include <vector>

#include "filterddp/common.hpp"

namespace filterddp {

/// Problem dimensions. Stages are indexed t = 0..N-1; dynamics link t to t+1
/// for t < N-1 only.
struct Dims {
  int N = 1;
  int nx = 1;
  int nu = 1;
  int nc = 0;

  /// Throws ContractViolation unless N, nx, nu >= 1 and 0 <= nc <= nu.
  void validate() const;
};

/// Value and derivatives of a scalar stage function g(x, u).
/// `ux` is d2g/(du dx), shaped nu x nx.
struct ScalarDerivatives {
  double value = 0.0;
  VectorXd x;
  VectorXd u;
  MatrixXd xx;
  MatrixXd ux;
  MatrixXd uu;
};

/// Value and derivatives of a vector stage function g(x, u) in R^m.
/// Jacobians are m x nx and m x nu. Second derivatives are stored per output
/// component: xx[k] is nx x nx, ux[k] is nu x nx, uu[k] is nu x nu. Empty
/// tensors mean "not supplied" and are treated as zero.
struct VectorDerivatives {
  VectorXd value;
  MatrixXd x;
  MatrixXd u;
  Tensor3 xx;
  Tensor3 ux;
  Tensor3 uu;

  bool has_second_order() const { return !xx.empty(); }
};

/**
 * Discrete-time optimal control problem
 *
 *   min  sum_t l_t(x_t, u_t)
 *   s.t. x_0 = x_init,  x_{t+1} = f_t(x_t, u_t),  c_t(x_t, u_t) = 0,
 *        u_t[i] >= 0 for every i in the nonnegativity mask.
 *
 * Implementations must be pure: identical inputs give identical outputs, and
 * a model may be shared by concurrent solves. The dynamics are never called
 * at the last stage.
 */
class OcpModel {
 public:
  virtual ~OcpModel() = default;

  virtual Dims dims() const = 0;
  virtual VectorXd initial_state() const = 0;

  /// Either empty (pure equality problem) or of length nu.
  virtual std::vector<bool> nonneg_mask() const { return {}; }

  virtual double cost(int t, const VectorXd& x, const VectorXd& u) const = 0;
  virtual VectorXd dynamics(int t, const VectorXd& x,
                            const VectorXd& u) const = 0;
  virtual VectorXd constraints(int t, const VectorXd& x,
                               const VectorXd& u) const = 0;

  virtual ScalarDerivatives cost_derivatives(int t, const VectorXd& x,
                                             const VectorXd& u) const = 0;
  /// Second-order tensors may be left empty (Gauss-Newton treatment).
  virtual VectorDerivatives dynamics_derivatives(int t, const VectorXd& x,
                                                 const VectorXd& u) const = 0;
  virtual VectorDerivatives constraint_derivatives(
      int t, const VectorXd& x, const VectorXd& u) const = 0;
};

/// Indices of masked (u >= 0) control components.
std::vector<int> bounded_indices(const OcpModel& model);

inline bool has_bounds(const OcpModel& model) {
  return !bounded_indices(model).empty();
}

/// Full primal-dual iterate. `z` is zero outside the nonnegativity mask and
/// unused for pure equality problems.
struct Iterate {
  Trajectory x;
  Trajectory u;
  Trajectory phi;
  Trajectory lambda;
  Trajectory z;
  double theta = 0.0;
  double lagrangian = 0.0;

  static Iterate zeros(const Dims& dims);
};

/// Derivatives of the stage functions at one point plus the assembled
/// stage Lagrangian L = l + phi^T c.
struct StageDerivatives {
  bool terminal = false;
  ScalarDerivatives cost;
  VectorDerivatives dynamics;  // empty at the terminal stage
  VectorDerivatives constraints;

  VectorXd Lx;
  VectorXd Lu;
  MatrixXd Lxx;
  MatrixXd Lux;
  MatrixXd Luu;
};

StageDerivatives evaluate_stage_derivatives(const OcpModel& model, int t,
                                            const VectorXd& x,
                                            const VectorXd& u,
                                            const VectorXd& phi);

/// Throws ContractViolation if trajectory lengths or vector sizes disagree
/// with the model dimensions. Pass an empty trajectory to skip a check.
void check_trajectories(const Dims& dims, const Trajectory& x,
                        const Trajectory& u, const Trajectory& phi = {});

/// Constraint violation: sum over stages of ||c_t||_1.
double evaluate_theta(const OcpModel& model, const Trajectory& x,
                      const Trajectory& u);

/// Plain objective sum_t l_t.
double evaluate_cost(const OcpModel& model, const Trajectory& x,
                     const Trajectory& u);

/**
 * Lagrangian sum_t [ l_t - mu * sum_{i in mask} ln u_t[i] + phi_t^T c_t ].
 *
 * With mu > 0 every masked control must be strictly positive, otherwise a
 * DomainError is thrown.
 */
double evaluate_lagrangian(const OcpModel& model, const Trajectory& x,
                           const Trajectory& u, const Trajectory& phi,
                           double mu = 0.0);

/// Recomputes iterate.theta and iterate.lagrangian from scratch.
void refresh_merit(const OcpModel& model, Iterate& iterate, double mu);

/// Residuals of the first-order optimality conditions, one vector per stage.
/// lambda_{N} (one past the end) is taken as zero.
struct KktResiduals {
  Trajectory grad_x;       // L_x - lambda_t + f_x^T lambda_{t+1}
  Trajectory grad_u;       // L_u + f_u^T lambda_{t+1}
  Trajectory dynamics;     // x_0 - x_init, then f(x_{t-1}, u_{t-1}) - x_t
  Trajectory constraints;  // c_t

  double max_abs() const;
};

KktResiduals kkt_residuals(const OcpModel& model, const Iterate& iterate);

/// E = max_t max(||L_u + f_u^T lambda_{t+1} - z_t||_inf, ||c_t||_inf).
/// The state gradient is omitted: the lambda recursion zeroes it.
double optimality_error(const OcpModel& model, const Iterate& iterate);

/// One row of a derivative check: the largest mismatch between a supplied
/// derivative and central differences of its parent, measured as
/// |fd - analytic| / max(1, |analytic|).
struct DerivativeError {
  std::string name;
  double error = 0.0;
};

struct DerivativeCheckReport {
  std::vector<DerivativeError> entries;

  double max_error() const;
  double error(const std::string& name) const;
};

/// Compares every supplied derivative with central differences at each stage
/// of the given trajectories.
DerivativeCheckReport derivative_check(const OcpModel& model,
                                       const Trajectory& x,
                                       const Trajectory& u,
                                       const Trajectory& phi, double h);

}  // namespace filterddp
