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

#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "filterddp/backward_pass.hpp"
#include "filterddp/ocp.hpp"

namespace filterddp {

/**
 * Set of (theta, lagrangian) pairs whose upper-right quadrants are taboo,
 * together with the cap theta >= theta_max. Entries never dominate each
 * other.
 */
struct Filter {
  std::vector<std::pair<double, double>> entries;
  double theta_max = std::numeric_limits<double>::infinity();

  static Filter with_cap(double theta_max) { return Filter{{}, theta_max}; }
  std::size_t size() const { return entries.size(); }
};

/// True iff theta >= theta_max or some entry has theta >= theta_f and
/// lagrangian >= L_f.
bool filter_blocks(const Filter& filter, double theta, double lagrangian);

/// theta+ <= (1 - gamma_theta) theta_bar  or  L+ <= L_bar - gamma_L theta_bar.
bool sufficient_decrease(double theta_bar, double lagrangian_bar,
                         double theta_trial, double lagrangian_trial,
                         double gamma_theta, double gamma_lagrangian);

/// gamma m < 0 and (-gamma m)^s_L gamma^(1 - s_L) > delta theta_bar^s_theta.
bool switching_holds(double m, double gamma, double theta_bar, double delta,
                     double s_theta, double s_lagrangian);

/// L+ <= L_bar + eta gamma m.
bool armijo_holds(double lagrangian_bar, double lagrangian_trial, double m,
                  double gamma, double eta);

/// Adds ((1 - gamma_theta) theta_bar, L_bar - gamma_L theta_bar) and drops
/// entries whose region it covers.
Filter augment_filter(Filter filter, double theta_bar, double lagrangian_bar,
                      double gamma_theta, double gamma_lagrangian);

/// Fraction-to-the-boundary parameter max(tau_min, 1 - mu).
double fraction_to_boundary_tau(double mu, double tau_min);

/// Trial iterate generated by the nonlinear forward rollout.
struct TrialPoint {
  Iterate iterate;
  double gamma = 0.0;
  bool diverged = false;  // non-finite value met during the rollout
  bool positive = true;   // masked u and z strictly positive
};

/**
 * Forward rollout from x_init: u+ = u + gamma alpha + beta (x+ - x),
 * phi+ and z+ analogously, x+_{t+1} = f(x+_t, u+_t). Caches theta+ and the
 * (barrier) Lagrangian; the Lagrangian is +inf when masked controls are not
 * positive. lambda is copied from `current`.
 */
TrialPoint rollout(const OcpModel& model, const Iterate& current,
                   const GainsTrajectory& gains, double gamma,
                   const std::optional<BarrierMode>& barrier);

/// u+ >= (1 - tau) u and z+ >= (1 - tau) z on every masked component.
bool fraction_to_boundary_ok(const TrialPoint& trial, const Iterate& current,
                             double tau, const std::vector<int>& bounded);

enum class Rejection {
  kFilterBlocked,
  kInsufficientDecrease,
  kArmijoFailed,
  kBoundaryViolated,
  kRolloutDiverged,
};

std::string_view to_string(Rejection r);

struct LineSearchParams {
  double gamma_theta = 1e-5;
  double gamma_lagrangian = 1e-5;
  double delta = 1.0;
  double s_theta = 1.1;
  double s_lagrangian = 2.3;
  double eta = 1e-4;
  double gamma_min = 1e-9;
  double theta_min = 1e-4;
  double tau = 0.99;  // only used with a barrier
};

struct LineSearchOutcome {
  bool accepted = false;
  bool is_l_type = false;
  double gamma = 0.0;
  std::vector<Rejection> rejections;  // one per rejected trial, in order
  std::optional<TrialPoint> trial;    // the accepted point

  int trials() const {
    return static_cast<int>(rejections.size()) + (accepted ? 1 : 0);
  }
};

/**
 * Backtracking search over gamma = 1, 1/2, 1/4, ... Each trial is checked for
 * fraction-to-the-boundary (barrier mode), filter membership, then either the
 * Armijo condition (when theta_bar < theta_min and the switching condition
 * hold) or the sufficient-decrease pair. Fails once gamma < gamma_min.
 */
LineSearchOutcome line_search(const OcpModel& model, const Iterate& current,
                              const GainsTrajectory& gains, double m,
                              const Filter& filter,
                              const LineSearchParams& params,
                              const std::optional<BarrierMode>& barrier);

}  // namespace filterddp
