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

#include "filterddp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <string>

namespace filterddp {

void SolverConfig::validate() const {
  auto in_open = [](double v, double lo, double hi) { return v > lo && v < hi; };
  require(eps_tol > 0.0, "eps_tol must be positive");
  require(max_iters >= 0, "max_iters must be nonnegative");
  require(in_open(gamma_theta, 0.0, 1.0), "gamma_theta must lie in (0, 1)");
  require(in_open(gamma_lagrangian, 0.0, 1.0),
          "gamma_lagrangian must lie in (0, 1)");
  require(delta > 0.0, "delta must be positive");
  require(s_theta > 1.0, "s_theta must exceed 1");
  require(s_lagrangian >= 1.0, "s_lagrangian must be at least 1");
  require(in_open(eta, 0.0, 0.5), "eta must lie in (0, 1/2)");
  require(in_open(gamma_min, 0.0, 1.0), "gamma_min must lie in (0, 1)");
  require(theta_max_factor > 0.0, "theta_max_factor must be positive");
  require(theta_min_factor > 0.0, "theta_min_factor must be positive");
  require(mu_init > 0.0, "mu_init must be positive");
  require(kappa_eps > 0.0, "kappa_eps must be positive");
  require(in_open(kappa_mu, 0.0, 1.0), "kappa_mu must lie in (0, 1)");
  require(in_open(theta_mu, 1.0, 2.0), "theta_mu must lie in (1, 2)");
  require(in_open(tau_min, 0.0, 1.0), "tau_min must lie in (0, 1)");
  const RegularizationConfig& r = regularization;
  require(r.delta_w_init > 0.0 && r.delta_w_min > 0.0 &&
              r.delta_w_max > r.delta_w_init,
          "regularization: need 0 < delta_w_init < delta_w_max");
  require(in_open(r.decrease_factor, 0.0, 1.0),
          "regularization: decrease_factor must lie in (0, 1)");
  require(r.increase_factor > 1.0,
          "regularization: increase_factor must exceed 1");
  require(r.delta_c_base >= 0.0 && r.delta_c_exponent >= 0.0,
          "regularization: delta_c rule must be nonnegative");
}

LineSearchParams SolverConfig::line_search_params(double theta_min,
                                                  double tau) const {
  return {gamma_theta, gamma_lagrangian, delta, s_theta, s_lagrangian,
          eta,         gamma_min,        theta_min, tau};
}

BarrierConfig SolverConfig::barrier_config() const {
  return {mu_init, kappa_eps, kappa_mu, theta_mu, tau_min, eps_tol};
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kMaxIters:
      return "max_iters";
    case SolverStatus::kLineSearchFailure:
      return "line_search_failure";
    case SolverStatus::kIllConditioned:
      return "ill_conditioned";
    case SolverStatus::kRegularizationOverflow:
      return "regularization_overflow";
  }
  return "unknown";
}

int SolverReport::iterations() const {
  return static_cast<int>(std::count_if(
      records.begin(), records.end(),
      [](const IterationRecord& r) { return r.gamma > 0.0; }));
}

Trajectory simulate(const OcpModel& model, const Trajectory& u) {
  const Dims d = model.dims();
  require(static_cast<int>(u.size()) == d.N,
          "simulate: control trajectory length differs from horizon");
  Trajectory x(d.N);
  x[0] = model.initial_state();
  for (int t = 0; t + 1 < d.N; ++t) {
    x[t + 1] = model.dynamics(t, x[t], u[t]);
  }
  return x;
}

SolverReport solve(const OcpModel& model, const Trajectory& u_init,
                   const SolverConfig& config) {
  const Dims d = model.dims();
  d.validate();
  check_trajectories(d, Trajectory(d.N, VectorXd::Zero(d.nx)), u_init);
  for (const auto& u : u_init) {
    if (!u.allFinite()) {
      throw InputError("solve: initial controls must be finite");
    }
  }
  Iterate start = Iterate::zeros(d);
  start.u = u_init;
  make_interior(bounded_indices(model), start.u, start.z);
  return solve(model, start, config);
}

namespace {

using Clock = std::chrono::steady_clock;

IterationRecord make_record(int k, const OcpModel& model, const Iterate& w,
                            const std::optional<BarrierMode>& barrier) {
  IterationRecord r;
  r.k = k;
  r.barrier = barrier.has_value();
  r.mu = barrier ? barrier->mu : 0.0;
  r.cost = evaluate_cost(model, w.x, w.u);
  r.theta = w.theta;
  r.lagrangian = w.lagrangian;
  return r;
}

}  // namespace

SolverReport solve(const OcpModel& model, const Iterate& start,
                   const SolverConfig& config) {
  const auto t0 = Clock::now();
  config.validate();
  const Dims d = model.dims();
  d.validate();
  check_trajectories(d, Trajectory(d.N, VectorXd::Zero(d.nx)), start.u,
                     start.phi);

  const std::vector<int> bounded = bounded_indices(model);
  const bool interior = !bounded.empty();

  Iterate w = start;
  w.x = simulate(model, w.u);
  if (w.lambda.size() != static_cast<std::size_t>(d.N)) {
    w.lambda.assign(d.N, VectorXd::Zero(d.nx));
  }
  if (w.z.size() != static_cast<std::size_t>(d.N)) {
    w.z.assign(d.N, VectorXd::Zero(d.nu));
  }
  for (int t = 0; t < d.N; ++t) {
    for (int i : bounded) {
      require(w.u[t](i) > 0.0 && w.z[t](i) > 0.0,
              "solve: masked controls and bound duals must start positive");
    }
  }

  const BarrierConfig bconf = config.barrier_config();
  BarrierState bstate = BarrierState::initial(bconf);
  auto mode = [&]() -> std::optional<BarrierMode> {
    if (!interior) {
      return std::nullopt;
    }
    return BarrierMode{bstate.mu, bounded};
  };
  auto dc_scale = [&]() {
    return interior ? std::max(bstate.mu, config.eps_tol) : config.eps_tol;
  };

  refresh_merit(model, w, interior ? bstate.mu : 0.0);
  const double theta_scale = std::max(1.0, w.theta);
  const double theta_min = config.theta_min_factor * theta_scale;
  Filter filter = Filter::with_cap(config.theta_max_factor * theta_scale);
  RegState reg;

  SolverReport report;
  report.status = SolverStatus::kMaxIters;
  auto emit = [&](const IterationRecord& rec) {
    report.records.push_back(rec);
    if (config.observer) {
      config.observer(rec, w);
    }
  };
  for (int k = 0;; ++k) {
    BackwardPassResult bp;
    try {
      bp = backward_pass(model, w, reg, mode(), config.regularization,
                         dc_scale(), config.gauss_newton);
      double err = 0.0;
      if (!interior) {
        err = optimality_error(model, w);
        report.final_error = err;
      } else {
        report.final_error = perturbed_error(model, w, 0.0);
        if (report.final_error >= config.eps_tol) {
          SubproblemAdvance adv =
              advance_subproblem(bstate, model, w, filter, bconf, k == 0);
          if (adv.decreases > 0) {
            bstate = adv.state;
            filter = std::move(adv.filter);
            refresh_merit(model, w, bstate.mu);
            bp = backward_pass(model, w, reg, mode(), config.regularization,
                               dc_scale(), config.gauss_newton);
          }
        }
        err = perturbed_error(model, w, bstate.mu);
      }
      reg = bp.reg;

      IterationRecord rec = make_record(k, model, w, mode());
      rec.error = err;
      rec.delta_w = bp.max_delta_w;
      rec.m = bp.expected_decrease;
      rec.filter_size = static_cast<int>(filter.size());

      if (report.final_error < config.eps_tol) {
        report.status = SolverStatus::kConverged;
        emit(rec);
        break;
      }
      if (k >= config.max_iters) {
        report.status = SolverStatus::kMaxIters;
        emit(rec);
        break;
      }

      const LineSearchOutcome ls =
          line_search(model, w, bp.gains, bp.expected_decrease, filter,
                      config.line_search_params(theta_min, bstate.tau),
                      mode());
      rec.trials = ls.trials();
      if (!ls.accepted) {
        report.status = SolverStatus::kLineSearchFailure;
        report.message = "no acceptable step size above gamma_min";
        emit(rec);
        break;
      }
      if (!ls.is_l_type) {
        filter = augment_filter(std::move(filter), w.theta, w.lagrangian,
                                config.gamma_theta, config.gamma_lagrangian);
      }
      rec.gamma = ls.gamma;
      rec.l_type = ls.is_l_type;
      rec.filter_size = static_cast<int>(filter.size());
      emit(rec);
      w = ls.trial->iterate;
    } catch (const RegularizationOverflow& e) {
      report.status = SolverStatus::kRegularizationOverflow;
      report.message = e.what();
      break;
    } catch (const IllConditioned& e) {
      report.status = SolverStatus::kIllConditioned;
      report.message = e.what();
      break;
    }
  }
  report.solution = std::move(w);
  report.wall_time =
      std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

double primal_dual_distance(const Iterate& a, const Iterate& b) {
  double sq = 0.0;
  for (std::size_t t = 0; t < a.u.size(); ++t) {
    sq += (a.x[t] - b.x[t]).squaredNorm();
    sq += (a.u[t] - b.u[t]).squaredNorm();
    sq += (a.phi[t] - b.phi[t]).squaredNorm();
  }
  return std::sqrt(sq);
}

RateProbe local_rate_probe(const OcpModel& model, const SolverConfig& config,
                           const Iterate& solution,
                           const std::vector<double>& radii,
                           std::uint64_t seed) {
  require(!has_bounds(model),
          "local_rate_probe: only equality-mode problems are supported");
  const Dims d = model.dims();
  check_trajectories(d, solution.x, solution.u, solution.phi);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Trajectory dir(d.N);
  double norm2 = 0.0;
  for (auto& v : dir) {
    v.resize(d.nu);
    for (int i = 0; i < d.nu; ++i) {
      v(i) = normal(rng);
    }
    norm2 += v.squaredNorm();
  }

  RateProbe probe;
  for (double radius : radii) {
    require(radius >= 0.0, "local_rate_probe: radii must be nonnegative");
    const double scale = norm2 > 0.0 ? radius / std::sqrt(norm2) : 0.0;

    Iterate w = solution;
    for (int t = 0; t < d.N; ++t) {
      w.u[t] += scale * dir[t];
    }
    w.x = simulate(model, w.u);
    refresh_merit(model, w, 0.0);

    RateProbeRow row;
    row.radius = radius;
    row.before = primal_dual_distance(w, solution);
    try {
      BackwardPassResult bp =
          backward_pass(model, w, RegState{}, std::nullopt,
                        config.regularization, config.eps_tol,
                        config.gauss_newton);
      const TrialPoint trial = rollout(model, w, bp.gains, 1.0, std::nullopt);
      if (trial.diverged) {
        row.valid = false;
        row.after = std::numeric_limits<double>::infinity();
      } else {
        row.after = primal_dual_distance(trial.iterate, solution);
        row.valid = row.after < row.before;
      }
    } catch (const SolverAbort&) {
      row.valid = false;
      row.after = std::numeric_limits<double>::infinity();
    }
    probe.rows.push_back(row);
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : probe.rows) {
    if (!r.valid || !(r.before > 0.0) || !(r.after > 0.0)) {
      continue;
    }
    const double lx = std::log(r.before);
    const double ly = std::log(r.after);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++probe.fitted;
  }
  if (probe.fitted >= 2) {
    const double n = probe.fitted;
    probe.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    probe.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return probe;
}

}  // namespace filterddp
