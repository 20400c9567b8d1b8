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

#include "filterddp/forward_filter.hpp"

#include <algorithm>
#include <cmath>

namespace filterddp {

bool filter_blocks(const Filter& filter, double theta, double lagrangian) {
  if (theta >= filter.theta_max) {
    return true;
  }
  return std::any_of(filter.entries.begin(), filter.entries.end(),
                     [&](const auto& e) {
                       return theta >= e.first && lagrangian >= e.second;
                     });
}

bool sufficient_decrease(double theta_bar, double lagrangian_bar,
                         double theta_trial, double lagrangian_trial,
                         double gamma_theta, double gamma_lagrangian) {
  return theta_trial <= (1.0 - gamma_theta) * theta_bar ||
         lagrangian_trial <= lagrangian_bar - gamma_lagrangian * theta_bar;
}

bool switching_holds(double m, double gamma, double theta_bar, double delta,
                     double s_theta, double s_lagrangian) {
  if (!(gamma * m < 0.0)) {
    return false;
  }
  return std::pow(-gamma * m, s_lagrangian) * std::pow(gamma, 1.0 - s_lagrangian) >
         delta * std::pow(theta_bar, s_theta);
}

bool armijo_holds(double lagrangian_bar, double lagrangian_trial, double m,
                  double gamma, double eta) {
  return lagrangian_trial <= lagrangian_bar + eta * gamma * m;
}

Filter augment_filter(Filter filter, double theta_bar, double lagrangian_bar,
                      double gamma_theta, double gamma_lagrangian) {
  const double theta_new = (1.0 - gamma_theta) * theta_bar;
  const double lagr_new = lagrangian_bar - gamma_lagrangian * theta_bar;
  const bool covered = std::any_of(
      filter.entries.begin(), filter.entries.end(), [&](const auto& e) {
        return e.first <= theta_new && e.second <= lagr_new;
      });
  if (covered) {
    return filter;
  }
  std::erase_if(filter.entries, [&](const auto& e) {
    return theta_new <= e.first && lagr_new <= e.second;
  });
  filter.entries.emplace_back(theta_new, lagr_new);
  return filter;
}

double fraction_to_boundary_tau(double mu, double tau_min) {
  return std::max(tau_min, 1.0 - mu);
}

TrialPoint rollout(const OcpModel& model, const Iterate& current,
                   const GainsTrajectory& gains, double gamma,
                   const std::optional<BarrierMode>& barrier) {
  const Dims d = model.dims();
  require(static_cast<int>(gains.size()) == d.N,
          "rollout: gains trajectory length differs from horizon");
  require(gamma >= 0.0 && gamma <= 1.0, "rollout: step size must lie in [0, 1]");

  TrialPoint trial;
  trial.gamma = gamma;
  Iterate& next = trial.iterate;
  next.x.resize(d.N);
  next.u.resize(d.N);
  next.phi.resize(d.N);
  next.z.resize(d.N);
  next.lambda = current.lambda;

  auto fail = [&]() {
    trial.diverged = true;
    trial.positive = false;
    next.theta = std::numeric_limits<double>::infinity();
    next.lagrangian = std::numeric_limits<double>::infinity();
    return trial;
  };

  next.x[0] = model.initial_state();
  for (int t = 0; t < d.N; ++t) {
    const StageGains& g = gains[t];
    const VectorXd dx = next.x[t] - current.x[t];
    next.u[t] = current.u[t] + gamma * g.alpha + g.beta * dx;
    next.phi[t] = current.phi[t] + gamma * g.psi + g.omega * dx;
    if (barrier) {
      next.z[t] = current.z[t] + gamma * g.chi + g.zeta * dx;
    } else {
      next.z[t] = current.z.empty() ? VectorXd::Zero(d.nu) : current.z[t];
    }
    if (!next.u[t].allFinite() || !next.phi[t].allFinite() ||
        !next.z[t].allFinite()) {
      return fail();
    }
    if (t + 1 < d.N) {
      next.x[t + 1] = model.dynamics(t, next.x[t], next.u[t]);
      if (!next.x[t + 1].allFinite()) {
        return fail();
      }
    }
  }

  if (barrier) {
    for (int t = 0; t < d.N && trial.positive; ++t) {
      for (int i : barrier->bounded) {
        if (!(next.u[t](i) > 0.0) || !(next.z[t](i) > 0.0)) {
          trial.positive = false;
          break;
        }
      }
    }
  }

  next.theta = evaluate_theta(model, next.x, next.u);
  if (trial.positive) {
    next.lagrangian = evaluate_lagrangian(model, next.x, next.u, next.phi,
                                          barrier ? barrier->mu : 0.0);
  } else {
    next.lagrangian = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(next.theta) || std::isnan(next.lagrangian)) {
    return fail();
  }
  return trial;
}

bool fraction_to_boundary_ok(const TrialPoint& trial, const Iterate& current,
                             double tau, const std::vector<int>& bounded) {
  const auto N = current.u.size();
  for (std::size_t t = 0; t < N; ++t) {
    for (int i : bounded) {
      if (trial.iterate.u[t](i) < (1.0 - tau) * current.u[t](i) ||
          trial.iterate.z[t](i) < (1.0 - tau) * current.z[t](i)) {
        return false;
      }
    }
  }
  return true;
}

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::kFilterBlocked:
      return "filter-blocked";
    case Rejection::kInsufficientDecrease:
      return "insufficient-decrease";
    case Rejection::kArmijoFailed:
      return "armijo-failed";
    case Rejection::kBoundaryViolated:
      return "boundary-violated";
    case Rejection::kRolloutDiverged:
      return "rollout-diverged";
  }
  return "unknown";
}

LineSearchOutcome line_search(const OcpModel& model, const Iterate& current,
                              const GainsTrajectory& gains, double m,
                              const Filter& filter,
                              const LineSearchParams& params,
                              const std::optional<BarrierMode>& barrier) {
  LineSearchOutcome out;
  const double theta_bar = current.theta;
  const double lagr_bar = current.lagrangian;

  for (double gamma = 1.0; gamma >= params.gamma_min; gamma *= 0.5) {
    TrialPoint trial = rollout(model, current, gains, gamma, barrier);
    if (trial.diverged) {
      out.rejections.push_back(Rejection::kRolloutDiverged);
      continue;
    }
    if (barrier && (!trial.positive ||
                    !fraction_to_boundary_ok(trial, current, params.tau,
                                             barrier->bounded))) {
      out.rejections.push_back(Rejection::kBoundaryViolated);
      continue;
    }
    const double theta = trial.iterate.theta;
    const double lagr = trial.iterate.lagrangian;
    if (filter_blocks(filter, theta, lagr)) {
      out.rejections.push_back(Rejection::kFilterBlocked);
      continue;
    }
    const bool l_step =
        theta_bar < params.theta_min &&
        switching_holds(m, gamma, theta_bar, params.delta, params.s_theta,
                        params.s_lagrangian);
    if (l_step) {
      if (!armijo_holds(lagr_bar, lagr, m, gamma, params.eta)) {
        out.rejections.push_back(Rejection::kArmijoFailed);
        continue;
      }
    } else if (!sufficient_decrease(theta_bar, lagr_bar, theta, lagr,
                                    params.gamma_theta,
                                    params.gamma_lagrangian)) {
      out.rejections.push_back(Rejection::kInsufficientDecrease);
      continue;
    }
    out.accepted = true;
    out.is_l_type = l_step;
    out.gamma = gamma;
    out.trial = std::move(trial);
    return out;
  }
  return out;
}

}  // namespace filterddp
