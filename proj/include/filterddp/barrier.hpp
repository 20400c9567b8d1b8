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

#include <vector>

#include "filterddp/forward_filter.hpp"
#include "filterddp/ocp.hpp"

namespace filterddp {

struct BarrierConfig {
  double mu_init = 1.0;
  double kappa_eps = 10.0;
  double kappa_mu = 0.2;
  double theta_mu = 1.2;
  double tau_min = 0.99;
  double eps_tol = 1e-7;
};

/// Position in the sequence of barrier subproblems.
struct BarrierState {
  double mu = 1.0;
  double tau = 0.99;
  int j = 0;

  static BarrierState initial(const BarrierConfig& config);
};

/// max_t ||z_t * u_t - mu||_inf over the masked components.
double complementarity_error(const Iterate& iterate,
                             const std::vector<int>& bounded, double mu);

/// E_mu = max(E, complementarity_error(mu)). mu = 0 gives the overall test.
double perturbed_error(const OcpModel& model, const Iterate& iterate,
                       double mu);

/// max(eps_tol / 10, min(kappa_mu mu, mu^theta_mu)).
double update_mu(double mu, double eps_tol, double kappa_mu, double theta_mu);

struct SubproblemAdvance {
  BarrierState state;
  Filter filter;
  int decreases = 0;  // number of mu updates performed
};

/**
 * Closes barrier subproblems while E_mu < kappa_eps mu: updates mu and tau,
 * resets the filter to its cap. On the first outer iteration the test is
 * repeated until it fails; afterwards at most one update happens per call.
 * A no-op once mu sits on its floor.
 */
SubproblemAdvance advance_subproblem(const BarrierState& state,
                                     const OcpModel& model,
                                     const Iterate& iterate,
                                     const Filter& filter,
                                     const BarrierConfig& config,
                                     bool first_iteration);

/// Pushes masked controls to at least `floor` and sets their bound duals to
/// one. Controls outside the mask are left alone and their duals zeroed.
void make_interior(const std::vector<int>& bounded, Trajectory& u,
                   Trajectory& z, double floor = 1e-2);

}  // namespace filterddp
