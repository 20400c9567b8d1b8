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

#include "filterddp/backward_pass.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace filterddp {

ValueState ValueState::zero(int nx) {
  return {VectorXd::Zero(nx), MatrixXd::Zero(nx, nx), VectorXd::Zero(nx)};
}

StageQ assemble_stage_q(const StageDerivatives& stage, const ValueState& next,
                        const std::optional<StageBarrier>& barrier,
                        bool gauss_newton) {
  const auto nx = static_cast<int>(stage.Lx.size());
  const auto nu = static_cast<int>(stage.Lu.size());
  require(next.Vx.size() == nx && next.lambda.size() == nx &&
              next.Vxx.rows() == nx && next.Vxx.cols() == nx,
          "assemble_stage_q: value state has wrong dimension");

  StageQ q;
  q.Qu = stage.Lu;
  q.Qx = stage.Lx;
  q.H = stage.Luu;
  q.B = stage.Lux;
  q.C = stage.Lxx;

  if (!stage.terminal) {
    const MatrixXd& fx = stage.dynamics.x;
    const MatrixXd& fu = stage.dynamics.u;
    q.Qu.noalias() += fu.transpose() * next.Vx;
    q.Qx.noalias() += fx.transpose() * next.Vx;
    const MatrixXd Vxx_fu = next.Vxx * fu;
    q.H.noalias() += fu.transpose() * Vxx_fu;
    q.B.noalias() += Vxx_fu.transpose() * fx;
    q.C.noalias() += fx.transpose() * next.Vxx * fx;
    if (!gauss_newton && stage.dynamics.has_second_order()) {
      q.H += contract_first(next.lambda, stage.dynamics.uu, nu, nu);
      q.B += contract_first(next.lambda, stage.dynamics.ux, nu, nx);
      q.C += contract_first(next.lambda, stage.dynamics.xx, nx, nx);
    }
  }
  q.H = 0.5 * (q.H + q.H.transpose()).eval();
  q.C = 0.5 * (q.C + q.C.transpose()).eval();

  const VectorDerivatives& con = stage.constraints;
  if (con.value.size() > 0) {
    q.A = con.u.transpose();
    q.c = con.value;
    q.cx = con.x;
  } else {
    q.A = MatrixXd::Zero(nu, 0);
    q.c = VectorXd::Zero(0);
    q.cx = MatrixXd::Zero(0, nx);
  }

  q.Qu_hat = q.Qu;
  q.sigma = VectorXd::Zero(nu);
  if (barrier) {
    for (int i : barrier->bounded) {
      const double ui = barrier->u(i);
      require(ui > 0.0 && barrier->z(i) > 0.0,
              "assemble_stage_q: masked control and bound dual must be > 0");
      q.sigma(i) = barrier->z(i) / ui;
      q.Qu_hat(i) -= barrier->mu / ui;
    }
  }
  return q;
}

MatrixXd stage_kkt_matrix(const StageQ& q, double delta_w, double delta_c) {
  const auto nu = static_cast<int>(q.H.rows());
  const auto nc = static_cast<int>(q.A.cols());
  MatrixXd K(nu + nc, nu + nc);
  K.topLeftCorner(nu, nu) = q.H;
  K.topLeftCorner(nu, nu).diagonal() += q.sigma;
  K.topLeftCorner(nu, nu).diagonal().array() += delta_w;
  K.topRightCorner(nu, nc) = q.A;
  K.bottomLeftCorner(nc, nu) = q.A.transpose();
  K.bottomRightCorner(nc, nc) = -delta_c * MatrixXd::Identity(nc, nc);
  return K;
}

CorrectedFactor inertia_correct(const StageQ& q, RegState reg,
                                const RegularizationConfig& config,
                                double mu_or_tol) {
  const Inertia target{static_cast<int>(q.H.rows()),
                       static_cast<int>(q.A.cols()), 0};

  reg.delta_w = 0.0;
  reg.delta_c = 0.0;
  SymIndefFactor f =
      ldlt_factor_equilibrated(stage_kkt_matrix(q, 0.0, 0.0), config.zero_pivot_tol);
  if (f.inertia == target) {
    return {std::move(f), reg};
  }

  if (f.inertia.zero > 0) {
    reg.delta_c = config.delta_c_base *
                  std::pow(mu_or_tol, config.delta_c_exponent);
  }
  double delta_w = reg.delta_w_last == 0.0
                       ? config.delta_w_init
                       : std::max(config.delta_w_min,
                                  config.decrease_factor * reg.delta_w_last);
  while (true) {
    if (delta_w > config.delta_w_max) {
      throw RegularizationOverflow(
          "inertia correction: primal regularization exceeded its maximum");
    }
    f = ldlt_factor_equilibrated(stage_kkt_matrix(q, delta_w, reg.delta_c),
                    config.zero_pivot_tol);
    if (f.inertia == target) {
      reg.delta_w = delta_w;
      reg.delta_w_last = delta_w;
      return {std::move(f), reg};
    }
    delta_w *= config.increase_factor;
  }
}

StageGains solve_stage_kkt(const StageQ& q, const SymIndefFactor& factor,
                           const std::optional<StageBarrier>& barrier) {
  const auto nu = static_cast<int>(q.H.rows());
  const auto nc = static_cast<int>(q.A.cols());
  const auto nx = static_cast<int>(q.B.cols());
  require(factor.size() == nu + nc,
          "solve_stage_kkt: factor size does not match stage dimensions");

  MatrixXd rhs(nu + nc, 1 + nx);
  rhs.block(0, 0, nu, 1) = q.Qu_hat;
  rhs.block(0, 1, nu, nx) = q.B;
  if (nc > 0) {
    rhs.block(nu, 0, nc, 1) = q.c;
    rhs.block(nu, 1, nc, nx) = q.cx;
  }
  const MatrixXd sol = -ldlt_solve(factor, rhs);

  StageGains g;
  g.alpha = sol.block(0, 0, nu, 1);
  g.beta = sol.block(0, 1, nu, nx);
  g.psi = sol.block(nu, 0, nc, 1);
  g.omega = sol.block(nu, 1, nc, nx);
  g.chi = VectorXd::Zero(nu);
  g.zeta = MatrixXd::Zero(nu, nx);
  if (barrier) {
    for (int i : barrier->bounded) {
      const double ui = barrier->u(i);
      g.chi(i) = barrier->mu / ui - barrier->z(i) - q.sigma(i) * g.alpha(i);
      g.zeta.row(i) = -q.sigma(i) * g.beta.row(i);
    }
  }
  return g;
}

ValueState update_value(const StageQ& q, const StageGains& gains,
                        const StageDerivatives& stage, const ValueState& next) {
  ValueState v;
  v.Vx = q.Qx;
  v.Vx.noalias() += gains.beta.transpose() * q.Qu_hat;
  if (q.c.size() > 0) {
    v.Vx.noalias() += gains.omega.transpose() * q.c;
  }

  v.lambda = stage.Lx;
  if (!stage.terminal) {
    v.lambda.noalias() += stage.dynamics.x.transpose() * next.lambda;
  }

  MatrixXd H = q.H;
  H.diagonal() += q.sigma;
  const MatrixXd BtBeta = q.B.transpose() * gains.beta;
  v.Vxx = q.C + gains.beta.transpose() * H * gains.beta + BtBeta +
          BtBeta.transpose();
  v.Vxx = 0.5 * (v.Vxx + v.Vxx.transpose()).eval();
  return v;
}

BackwardPassResult backward_pass(const OcpModel& model, Iterate& iterate,
                                 RegState reg,
                                 const std::optional<BarrierMode>& barrier,
                                 const RegularizationConfig& config,
                                 double delta_c_scale, bool gauss_newton) {
  const Dims d = model.dims();
  check_trajectories(d, iterate.x, iterate.u, iterate.phi);
  if (iterate.lambda.size() != static_cast<std::size_t>(d.N)) {
    iterate.lambda.assign(d.N, VectorXd::Zero(d.nx));
  }

  BackwardPassResult out;
  out.gains.resize(d.N);
  ValueState next = ValueState::zero(d.nx);
  for (int t = d.N - 1; t >= 0; --t) {
    const StageDerivatives stage = evaluate_stage_derivatives(
        model, t, iterate.x[t], iterate.u[t], iterate.phi[t]);
    std::optional<StageBarrier> sb;
    if (barrier) {
      sb = StageBarrier{barrier->mu, barrier->bounded, iterate.u[t],
                        iterate.z[t]};
    }
    const StageQ q = assemble_stage_q(stage, next, sb, gauss_newton);
    CorrectedFactor cf = inertia_correct(q, reg, config, delta_c_scale);
    reg = cf.reg;
    out.max_delta_w = std::max(out.max_delta_w, reg.delta_w);
    out.max_condition = std::max(out.max_condition, cf.factor.condition);
    if (cf.factor.condition > config.max_condition) {
      throw IllConditioned("stage " + std::to_string(t) +
                           ": KKT matrix too ill conditioned");
    }
    StageGains g = solve_stage_kkt(q, cf.factor, sb);
    out.expected_decrease += q.Qu_hat.dot(g.alpha);
    if (q.c.size() > 0) {
      out.expected_decrease += g.psi.dot(q.c);
    }
    next = update_value(q, g, stage, next);
    iterate.lambda[t] = next.lambda;
    out.gains[t] = std::move(g);
  }
  out.reg = reg;
  return out;
}

}  // namespace filterddp
