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

#include "filterddp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "filterddp/linalg.hpp"

namespace filterddp {

void Dims::validate() const {
  require(N >= 1, "Dims: horizon N must be >= 1");
  require(nx >= 1, "Dims: state dimension must be >= 1");
  require(nu >= 1, "Dims: control dimension must be >= 1");
  require(nc >= 0 && nc <= nu,
          "Dims: constraint dimension must satisfy 0 <= nc <= nu");
}

std::vector<int> bounded_indices(const OcpModel& model) {
  const std::vector<bool> mask = model.nonneg_mask();
  std::vector<int> out;
  if (mask.empty()) {
    return out;
  }
  require(static_cast<int>(mask.size()) == model.dims().nu,
          "nonneg_mask must be empty or have one entry per control");
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) {
      out.push_back(i);
    }
  }
  return out;
}

Iterate Iterate::zeros(const Dims& dims) {
  Iterate it;
  it.x.assign(dims.N, VectorXd::Zero(dims.nx));
  it.u.assign(dims.N, VectorXd::Zero(dims.nu));
  it.phi.assign(dims.N, VectorXd::Zero(dims.nc));
  it.lambda.assign(dims.N, VectorXd::Zero(dims.nx));
  it.z.assign(dims.N, VectorXd::Zero(dims.nu));
  return it;
}

StageDerivatives evaluate_stage_derivatives(const OcpModel& model, int t,
                                            const VectorXd& x,
                                            const VectorXd& u,
                                            const VectorXd& phi) {
  const Dims d = model.dims();
  StageDerivatives s;
  s.terminal = (t == d.N - 1);
  s.cost = model.cost_derivatives(t, x, u);
  s.constraints = model.constraint_derivatives(t, x, u);
  if (!s.terminal) {
    s.dynamics = model.dynamics_derivatives(t, x, u);
  }

  const auto& c = s.constraints;
  s.Lx = s.cost.x;
  s.Lu = s.cost.u;
  s.Lxx = s.cost.xx;
  s.Lux = s.cost.ux;
  s.Luu = s.cost.uu;
  if (d.nc > 0) {
    s.Lx.noalias() += c.x.transpose() * phi;
    s.Lu.noalias() += c.u.transpose() * phi;
    s.Lxx += contract_first(phi, c.xx, d.nx, d.nx);
    s.Lux += contract_first(phi, c.ux, d.nu, d.nx);
    s.Luu += contract_first(phi, c.uu, d.nu, d.nu);
  }
  s.Lxx = 0.5 * (s.Lxx + s.Lxx.transpose()).eval();
  s.Luu = 0.5 * (s.Luu + s.Luu.transpose()).eval();
  return s;
}

void check_trajectories(const Dims& dims, const Trajectory& x,
                        const Trajectory& u, const Trajectory& phi) {
  auto check = [&](const Trajectory& traj, int size, const char* name) {
    if (traj.empty()) {
      return;
    }
    require(static_cast<int>(traj.size()) == dims.N,
            std::string(name) + " trajectory length differs from horizon");
    for (const auto& v : traj) {
      require(v.size() == size,
              std::string(name) + " vector has wrong dimension");
    }
  };
  check(x, dims.nx, "state");
  check(u, dims.nu, "control");
  check(phi, dims.nc, "multiplier");
  require(!x.empty() && !u.empty(), "state and control trajectories required");
}

double evaluate_theta(const OcpModel& model, const Trajectory& x,
                      const Trajectory& u) {
  const Dims d = model.dims();
  check_trajectories(d, x, u);
  double theta = 0.0;
  if (d.nc == 0) {
    return theta;
  }
  for (int t = 0; t < d.N; ++t) {
    theta += model.constraints(t, x[t], u[t]).lpNorm<1>();
  }
  return theta;
}

double evaluate_cost(const OcpModel& model, const Trajectory& x,
                     const Trajectory& u) {
  const Dims d = model.dims();
  check_trajectories(d, x, u);
  double J = 0.0;
  for (int t = 0; t < d.N; ++t) {
    J += model.cost(t, x[t], u[t]);
  }
  return J;
}

double evaluate_lagrangian(const OcpModel& model, const Trajectory& x,
                           const Trajectory& u, const Trajectory& phi,
                           double mu) {
  const Dims d = model.dims();
  check_trajectories(d, x, u, phi);
  require(mu >= 0.0, "evaluate_lagrangian: barrier parameter must be >= 0");
  const std::vector<int> bounded = mu > 0.0 ? bounded_indices(model)
                                            : std::vector<int>{};
  double total = 0.0;
  for (int t = 0; t < d.N; ++t) {
    double stage = model.cost(t, x[t], u[t]);
    for (int i : bounded) {
      if (!(u[t](i) > 0.0)) {
        throw DomainError("evaluate_lagrangian: masked control is not positive");
      }
      stage -= mu * std::log(u[t](i));
    }
    if (d.nc > 0 && !phi.empty()) {
      stage += phi[t].dot(model.constraints(t, x[t], u[t]));
    }
    total += stage;
  }
  return total;
}

void refresh_merit(const OcpModel& model, Iterate& iterate, double mu) {
  iterate.theta = evaluate_theta(model, iterate.x, iterate.u);
  iterate.lagrangian =
      evaluate_lagrangian(model, iterate.x, iterate.u, iterate.phi, mu);
}

double KktResiduals::max_abs() const {
  double out = 0.0;
  for (const Trajectory* traj : {&grad_x, &grad_u, &dynamics, &constraints}) {
    for (const auto& v : *traj) {
      if (v.size() > 0) {
        out = std::max(out, v.lpNorm<Eigen::Infinity>());
      }
    }
  }
  return out;
}

KktResiduals kkt_residuals(const OcpModel& model, const Iterate& it) {
  const Dims d = model.dims();
  check_trajectories(d, it.x, it.u, it.phi);
  require(static_cast<int>(it.lambda.size()) == d.N,
          "kkt_residuals: lambda trajectory length differs from horizon");
  KktResiduals r;
  r.grad_x.resize(d.N);
  r.grad_u.resize(d.N);
  r.dynamics.resize(d.N);
  r.constraints.resize(d.N);
  r.dynamics[0] = it.x[0] - model.initial_state();
  for (int t = 0; t < d.N; ++t) {
    const ScalarDerivatives l = model.cost_derivatives(t, it.x[t], it.u[t]);
    VectorXd gx = l.x;
    VectorXd gu = l.u;
    if (d.nc > 0) {
      const VectorDerivatives c =
          model.constraint_derivatives(t, it.x[t], it.u[t]);
      gx.noalias() += c.x.transpose() * it.phi[t];
      gu.noalias() += c.u.transpose() * it.phi[t];
      r.constraints[t] = c.value;
    } else {
      r.constraints[t] = VectorXd::Zero(0);
    }
    gx -= it.lambda[t];
    if (t + 1 < d.N) {
      const VectorDerivatives f =
          model.dynamics_derivatives(t, it.x[t], it.u[t]);
      gx.noalias() += f.x.transpose() * it.lambda[t + 1];
      gu.noalias() += f.u.transpose() * it.lambda[t + 1];
      r.dynamics[t + 1] = f.value - it.x[t + 1];
    }
    r.grad_x[t] = gx;
    r.grad_u[t] = gu;
  }
  return r;
}

double optimality_error(const OcpModel& model, const Iterate& iterate) {
  const KktResiduals r = kkt_residuals(model, iterate);
  const bool has_z = iterate.z.size() == r.grad_u.size();
  double out = 0.0;
  for (std::size_t t = 0; t < r.grad_u.size(); ++t) {
    VectorXd g = r.grad_u[t];
    if (has_z) {
      g -= iterate.z[t];
    }
    out = std::max(out, g.lpNorm<Eigen::Infinity>());
    if (r.constraints[t].size() > 0) {
      out = std::max(out, r.constraints[t].lpNorm<Eigen::Infinity>());
    }
  }
  return out;
}

double DerivativeCheckReport::max_error() const {
  double out = 0.0;
  for (const auto& e : entries) {
    out = std::max(out, e.error);
  }
  return out;
}

double DerivativeCheckReport::error(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) {
      return e.error;
    }
  }
  return 0.0;
}

namespace {

double mismatch(double fd, double analytic) {
  return std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));
}

double mismatch(const MatrixXd& fd, const MatrixXd& analytic) {
  if (fd.size() == 0) {
    return 0.0;
  }
  if (analytic.rows() != fd.rows() || analytic.cols() != fd.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double out = 0.0;
  for (Eigen::Index i = 0; i < fd.rows(); ++i) {
    for (Eigen::Index j = 0; j < fd.cols(); ++j) {
      out = std::max(out, mismatch(fd(i, j), analytic(i, j)));
    }
  }
  return out;
}

// Central-difference Jacobian of g with respect to the `which` argument
// (0 = x, 1 = u). Output is rows(g) x dim(arg).
MatrixXd fd_jacobian(
    const std::function<VectorXd(const VectorXd&, const VectorXd&)>& g,
    const VectorXd& x, const VectorXd& u, int which, double h) {
  const VectorXd& arg = which == 0 ? x : u;
  const Eigen::Index rows = g(x, u).size();
  MatrixXd J(rows, arg.size());
  for (Eigen::Index j = 0; j < arg.size(); ++j) {
    VectorXd xp = x, xm = x, up = u, um = u;
    if (which == 0) {
      xp(j) += h;
      xm(j) -= h;
    } else {
      up(j) += h;
      um(j) -= h;
    }
    J.col(j) = (g(xp, up) - g(xm, um)) / (2.0 * h);
  }
  return J;
}

}  // namespace

DerivativeCheckReport derivative_check(const OcpModel& model,
                                       const Trajectory& x,
                                       const Trajectory& u,
                                       const Trajectory& phi, double h) {
  const Dims d = model.dims();
  check_trajectories(d, x, u, phi);
  require(h > 0.0, "derivative_check: step must be positive");

  struct Acc {
    std::vector<DerivativeError> rows;
    void add(const std::string& name, double err) {
      for (auto& r : rows) {
        if (r.name == name) {
          r.error = std::max(r.error, err);
          return;
        }
      }
      rows.push_back({name, err});
    }
  } acc;

  for (int t = 0; t < d.N; ++t) {
    const VectorXd& xt = x[t];
    const VectorXd& ut = u[t];

    // Cost: gradient against values, Hessian against gradients.
    const ScalarDerivatives l = model.cost_derivatives(t, xt, ut);
    auto cost_fn = [&](const VectorXd& a, const VectorXd& b) {
      return VectorXd::Constant(1, model.cost(t, a, b));
    };
    auto cost_x = [&](const VectorXd& a, const VectorXd& b) {
      return model.cost_derivatives(t, a, b).x;
    };
    auto cost_u = [&](const VectorXd& a, const VectorXd& b) {
      return model.cost_derivatives(t, a, b).u;
    };
    acc.add("cost", mismatch(model.cost(t, xt, ut), l.value));
    acc.add("cost_x", mismatch(fd_jacobian(cost_fn, xt, ut, 0, h).transpose(),
                               l.x));
    acc.add("cost_u", mismatch(fd_jacobian(cost_fn, xt, ut, 1, h).transpose(),
                               l.u));
    acc.add("cost_xx", mismatch(fd_jacobian(cost_x, xt, ut, 0, h), l.xx));
    acc.add("cost_ux", mismatch(fd_jacobian(cost_u, xt, ut, 0, h), l.ux));
    acc.add("cost_uu", mismatch(fd_jacobian(cost_u, xt, ut, 1, h), l.uu));

    // Vector functions: Jacobians against values, each Hessian slice against
    // the Jacobian row of that component.
    auto check_vector = [&](const std::string& name,
                            const VectorDerivatives& g,
                            const std::function<VectorXd(const VectorXd&,
                                                          const VectorXd&)>&
                                value,
                            const std::function<VectorDerivatives(
                                const VectorXd&, const VectorXd&)>& derivs) {
      acc.add(name, mismatch(value(xt, ut), g.value));
      acc.add(name + "_x", mismatch(fd_jacobian(value, xt, ut, 0, h), g.x));
      acc.add(name + "_u", mismatch(fd_jacobian(value, xt, ut, 1, h), g.u));
      if (!g.has_second_order()) {
        return;
      }
      const Eigen::Index m = g.value.size();
      for (Eigen::Index k = 0; k < m; ++k) {
        auto row_x = [&](const VectorXd& a, const VectorXd& b) -> VectorXd {
          return derivs(a, b).x.row(k).transpose();
        };
        auto row_u = [&](const VectorXd& a, const VectorXd& b) -> VectorXd {
          return derivs(a, b).u.row(k).transpose();
        };
        acc.add(name + "_xx",
                mismatch(fd_jacobian(row_x, xt, ut, 0, h), g.xx[k]));
        acc.add(name + "_ux",
                mismatch(fd_jacobian(row_u, xt, ut, 0, h), g.ux[k]));
        acc.add(name + "_uu",
                mismatch(fd_jacobian(row_u, xt, ut, 1, h), g.uu[k]));
      }
    };

    if (t + 1 < d.N) {
      check_vector(
          "dynamics", model.dynamics_derivatives(t, xt, ut),
          [&](const VectorXd& a, const VectorXd& b) {
            return model.dynamics(t, a, b);
          },
          [&](const VectorXd& a, const VectorXd& b) {
            return model.dynamics_derivatives(t, a, b);
          });
    }
    if (d.nc > 0) {
      check_vector(
          "constraints", model.constraint_derivatives(t, xt, ut),
          [&](const VectorXd& a, const VectorXd& b) {
            return model.constraints(t, a, b);
          },
          [&](const VectorXd& a, const VectorXd& b) {
            return model.constraint_derivatives(t, a, b);
          });
    }

    // Assembled stage Lagrangian gradient.
    const StageDerivatives s = evaluate_stage_derivatives(model, t, xt, ut,
                                                          phi[t]);
    auto lagr = [&](const VectorXd& a, const VectorXd& b) {
      double v = model.cost(t, a, b);
      if (d.nc > 0) {
        v += phi[t].dot(model.constraints(t, a, b));
      }
      return VectorXd::Constant(1, v);
    };
    acc.add("lagrangian_x",
            mismatch(fd_jacobian(lagr, xt, ut, 0, h).transpose(), s.Lx));
    acc.add("lagrangian_u",
            mismatch(fd_jacobian(lagr, xt, ut, 1, h).transpose(), s.Lu));
  }

  DerivativeCheckReport report;
  report.entries = std::move(acc.rows);
  return report;
}

}  // namespace filterddp
