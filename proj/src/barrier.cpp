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

#include "filterddp/barrier.hpp"

#include <algorithm>
#include <cmath>

namespace filterddp {

BarrierState BarrierState::initial(const BarrierConfig& config) {
  return {config.mu_init, fraction_to_boundary_tau(config.mu_init, config.tau_min),
          0};
}

double complementarity_error(const Iterate& iterate,
                             const std::vector<int>& bounded, double mu) {
  double out = 0.0;
  for (std::size_t t = 0; t < iterate.u.size(); ++t) {
    for (int i : bounded) {
      out = std::max(out, std::abs(iterate.z[t](i) * iterate.u[t](i) - mu));
    }
  }
  return out;
}

double perturbed_error(const OcpModel& model, const Iterate& iterate,
                       double mu) {
  return std::max(optimality_error(model, iterate),
                  complementarity_error(iterate, bounded_indices(model), mu));
}

double update_mu(double mu, double eps_tol, double kappa_mu, double theta_mu) {
  require(kappa_mu > 0.0 && kappa_mu < 1.0, "update_mu: kappa_mu must lie in (0, 1)");
  require(theta_mu > 1.0 && theta_mu < 2.0, "update_mu: theta_mu must lie in (1, 2)");
  return std::max(eps_tol / 10.0,
                  std::min(kappa_mu * mu, std::pow(mu, theta_mu)));
}

SubproblemAdvance advance_subproblem(const BarrierState& state,
                                     const OcpModel& model,
                                     const Iterate& iterate,
                                     const Filter& filter,
                                     const BarrierConfig& config,
                                     bool first_iteration) {
  SubproblemAdvance out{state, filter, 0};
  const double E = optimality_error(model, iterate);
  const std::vector<int> bounded = bounded_indices(model);
  while (true) {
    const double mu = out.state.mu;
    const double e_mu =
        std::max(E, complementarity_error(iterate, bounded, mu));
    if (!(e_mu < config.kappa_eps * mu)) {
      break;
    }
    const double next = update_mu(mu, config.eps_tol, config.kappa_mu,
                                  config.theta_mu);
    if (!(next < mu)) {
      break;
    }
    out.state.mu = next;
    out.state.tau = fraction_to_boundary_tau(next, config.tau_min);
    ++out.state.j;
    out.filter = Filter::with_cap(filter.theta_max);
    ++out.decreases;
    if (!first_iteration) {
      break;
    }
  }
  return out;
}

void make_interior(const std::vector<int>& bounded, Trajectory& u,
                   Trajectory& z, double floor) {
  z.resize(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    z[t] = VectorXd::Zero(u[t].size());
    for (int i : bounded) {
      u[t](i) = std::max(u[t](i), floor);
      z[t](i) = 1.0;
    }
  }
}

}  // namespace filterddp
