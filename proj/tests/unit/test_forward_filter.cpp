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


#include <limits>

#include <gtest/gtest.h>

#include "filterddp/benchmarks.hpp"
#include "filterddp/forward_filter.hpp"
#include "filterddp/solver.hpp"
#include "toy_models.hpp"

namespace fd = filterddp;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using filterddp::LqModel;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(FilterBlocks, EmptyFilterAcceptsEverything) {
  const fd::Filter f;
  EXPECT_FALSE(fd::filter_blocks(f, 1e30, 1e30));
}

TEST(FilterBlocks, RegionMembership) {
  fd::Filter f;
  f.entries = {{1.0, 5.0}};
  EXPECT_TRUE(fd::filter_blocks(f, 2.0, 6.0));
  EXPECT_FALSE(fd::filter_blocks(f, 0.5, 6.0));
  EXPECT_FALSE(fd::filter_blocks(f, 2.0, 4.0));
}

TEST(FilterBlocks, CapIsTaboo) {
  const fd::Filter f = fd::Filter::with_cap(3.0);
  EXPECT_TRUE(fd::filter_blocks(f, 3.0, -kInf));
  EXPECT_FALSE(fd::filter_blocks(f, 2.999, 0.0));
}

TEST(SufficientDecrease, ThetaThresholdIsInclusive) {
  EXPECT_TRUE(fd::sufficient_decrease(1.0, 0.0, 0.9, 100.0, 0.1, 0.0));
  EXPECT_FALSE(fd::sufficient_decrease(1.0, 0.0, 0.91, 100.0, 0.1, 0.0));
}

TEST(SufficientDecrease, LagrangianThresholdIsInclusive) {
  EXPECT_TRUE(fd::sufficient_decrease(1.0, 10.0, 1.0, 9.9, 0.0, 0.1));
}

TEST(SufficientDecrease, FeasibleDegenerateCase) {
  EXPECT_TRUE(fd::sufficient_decrease(0.0, 2.0, 0.0, 2.0, 1e-5, 1e-5));
}

TEST(SwitchingHolds, DirectSubstitution) {
  EXPECT_TRUE(fd::switching_holds(-1.0, 1.0, 0.1, 1.0, 2.0, 1.0));
}

TEST(SwitchingHolds, AscentDirectionNeverSwitches) {
  EXPECT_FALSE(fd::switching_holds(1.0, 1.0, 0.0, 1.0, 2.0, 1.0));
  EXPECT_FALSE(fd::switching_holds(0.0, 1.0, 0.0, 1.0, 2.0, 1.0));
}

TEST(SwitchingHolds, ExponentArithmetic) {
  EXPECT_FALSE(fd::switching_holds(-1.0, 0.25, 1.0, 1.0, 1.1, 2.3));
  EXPECT_TRUE(fd::switching_holds(-1.0, 0.25, 0.2, 1.0, 1.1, 2.3));
}

TEST(ArmijoHolds, Threshold) {
  EXPECT_TRUE(fd::armijo_holds(1.0, 0.95, -1.0, 0.5, 0.1));
  EXPECT_FALSE(fd::armijo_holds(1.0, 0.951, -1.0, 0.5, 0.1));
  EXPECT_TRUE(fd::armijo_holds(1.0, 1.0, 0.0, 0.5, 0.1));
  EXPECT_FALSE(fd::armijo_holds(1.0, 1.0 + 1e-12, 0.0, 0.5, 0.1));
}

TEST(AugmentFilter, AddsMarginEntry) {
  const fd::Filter f = fd::augment_filter(fd::Filter{}, 1.0, 10.0, 0.1, 0.1);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_DOUBLE_EQ(f.entries[0].first, 0.9);
  EXPECT_DOUBLE_EQ(f.entries[0].second, 9.9);
}

TEST(AugmentFilter, PrunesDominatedEntries) {
  fd::Filter f;
  f.entries = {{0.9, 9.9}};
  f = fd::augment_filter(f, 0.5, 9.0, 0.0, 0.0);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.entries[0], std::make_pair(0.5, 9.0));
}

TEST(AugmentFilter, Idempotent) {
  fd::Filter f = fd::augment_filter(fd::Filter{}, 1.0, 10.0, 0.1, 0.1);
  f = fd::augment_filter(f, 1.0, 10.0, 0.1, 0.1);
  EXPECT_EQ(f.size(), 1u);
}

TEST(AugmentFilter, KeepsCap) {
  const fd::Filter f =
      fd::augment_filter(fd::Filter::with_cap(7.0), 1.0, 10.0, 0.1, 0.1);
  EXPECT_EQ(f.theta_max, 7.0);
}

TEST(FractionToBoundary, Tau) {
  EXPECT_DOUBLE_EQ(fd::fraction_to_boundary_tau(0.5, 0.99), 0.99);
  EXPECT_DOUBLE_EQ(fd::fraction_to_boundary_tau(1e-3, 0.99), 0.999);
}

TEST(FractionToBoundary, Check) {
  fd::Iterate current;
  current.u = {VectorXd::Ones(1)};
  current.z = {VectorXd::Ones(1)};
  fd::TrialPoint trial;
  trial.iterate.u = {VectorXd::Constant(1, 0.5)};
  trial.iterate.z = {VectorXd::Ones(1)};
  EXPECT_TRUE(fd::fraction_to_boundary_ok(trial, current, 0.99, {0}));
  trial.iterate.u[0](0) = 0.005;
  EXPECT_FALSE(fd::fraction_to_boundary_ok(trial, current, 0.99, {0}));
  EXPECT_TRUE(fd::fraction_to_boundary_ok(trial, current, 0.99, {}));
}

TEST(Rollout, HandRollout) {
  const auto model = fd::testing::scalar_lq(2, 1.0, 1.0, 1.0, 1.0, 0.0);
  fd::Iterate w = fd::Iterate::zeros(model->dims());
  w.x = fd::simulate(*model, w.u);
  fd::GainsTrajectory gains(2, fd::testing::zero_gains(1, 1, 0));
  for (auto& g : gains) {
    g.alpha(0) = 1.0;
  }
  const fd::TrialPoint trial = fd::rollout(*model, w, gains, 1.0, std::nullopt);
  EXPECT_FALSE(trial.diverged);
  EXPECT_DOUBLE_EQ(trial.iterate.u[0](0), 1.0);
  EXPECT_DOUBLE_EQ(trial.iterate.u[1](0), 1.0);
  EXPECT_DOUBLE_EQ(trial.iterate.x[0](0), 0.0);
  EXPECT_DOUBLE_EQ(trial.iterate.x[1](0), 1.0);
}

TEST(Rollout, ZeroStepReproducesIterate) {
  const auto model = fd::build_eqlq(3, 4, 2, 2, 1);
  fd::Iterate w = fd::Iterate::zeros(model->dims());
  for (auto& u : w.u) {
    u.setConstant(0.4);
  }
  w.x = fd::simulate(*model, w.u);
  fd::refresh_merit(*model, w, 0.0);
  const fd::BackwardPassResult bp =
      fd::backward_pass(*model, w, {}, std::nullopt, {}, 1e-7);
  const fd::TrialPoint trial = fd::rollout(*model, w, bp.gains, 0.0, std::nullopt);
  EXPECT_EQ(fd::primal_dual_distance(trial.iterate, w), 0.0);
  EXPECT_EQ(trial.iterate.theta, w.theta);
}

TEST(Rollout, DivergenceIsReported) {
  const auto model = fd::testing::scalar_lq(3, 1.0, 1.0, 1.0, 1.0, 0.0);
  fd::Iterate w = fd::Iterate::zeros(model->dims());
  w.x = fd::simulate(*model, w.u);
  fd::GainsTrajectory gains(3, fd::testing::zero_gains(1, 1, 0));
  gains[0].alpha(0) = 1e308;
  gains[1].beta(0, 0) = 1e308;
  const fd::TrialPoint trial = fd::rollout(*model, w, gains, 1.0, std::nullopt);
  EXPECT_TRUE(trial.diverged);
}

TEST(LineSearch, NewtonStepAcceptedAtFullLength) {
  const auto model = fd::build_eqlq(6, 5, 2, 2, 1);
  fd::Iterate w = fd::Iterate::zeros(model->dims());
  w.x = fd::simulate(*model, w.u);
  fd::refresh_merit(*model, w, 0.0);
  const fd::BackwardPassResult bp =
      fd::backward_pass(*model, w, {}, std::nullopt, {}, 1e-7);
  const fd::SolverConfig config;
  const fd::LineSearchOutcome out = fd::line_search(
      *model, w, bp.gains, bp.expected_decrease,
      fd::Filter::with_cap(1e4 * std::max(1.0, w.theta)),
      config.line_search_params(1e-4 * std::max(1.0, w.theta), 0.99),
      std::nullopt);
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(out.gamma, 1.0);
  EXPECT_EQ(out.trials(), 1);
  EXPECT_LT(out.trial->iterate.theta, 1e-10);
}

TEST(LineSearch, FilterBlockedFullStepBacktracks) {
  // Lagrangian along the step is (2 gamma - 1)^2 / 2 - 1/2.
  const auto base = fd::testing::scalar_lq(1, 1.0, 1.0, 0.0, 1.0, 0.0);
  LqModel::Stage stage = base->stage(0);
  stage.r(0) = -1.0;
  const LqModel model(base->dims(), base->initial_state(), {stage});
  fd::Iterate w = fd::Iterate::zeros(model.dims());
  fd::refresh_merit(model, w, 0.0);
  fd::GainsTrajectory gains(1, fd::testing::zero_gains(1, 1, 0));
  gains[0].alpha(0) = 2.0;
  fd::Filter filter;
  filter.entries = {{0.0, -0.25}};
  const fd::LineSearchOutcome out = fd::line_search(
      model, w, gains, -1.0, filter, fd::LineSearchParams{}, std::nullopt);
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(out.gamma, 0.5);
  EXPECT_TRUE(out.is_l_type);
  ASSERT_EQ(out.rejections.size(), 1u);
  EXPECT_EQ(out.rejections[0], fd::Rejection::kFilterBlocked);
}

TEST(LineSearch, FixedPointAcceptsFullStep) {
  const auto model = fd::build_eqlq(8, 4, 2, 2, 1);
  fd::Iterate w = fd::stacked_kkt_oracle(*model);
  fd::refresh_merit(*model, w, 0.0);
  const fd::BackwardPassResult bp =
      fd::backward_pass(*model, w, {}, std::nullopt, {}, 1e-7);
  const fd::LineSearchOutcome out =
      fd::line_search(*model, w, bp.gains, bp.expected_decrease,
                      fd::Filter::with_cap(1e4), fd::LineSearchParams{},
                      std::nullopt);
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(out.gamma, 1.0);
  EXPECT_LT(fd::primal_dual_distance(out.trial->iterate, w), 1e-10);
}

TEST(LineSearch, FailsBelowMinimumStep) {
  const auto model = fd::build_eqlq(8, 4, 2, 2, 1);
  fd::Iterate w = fd::Iterate::zeros(model->dims());
  w.x = fd::simulate(*model, w.u);
  fd::refresh_merit(*model, w, 0.0);
  const fd::BackwardPassResult bp =
      fd::backward_pass(*model, w, {}, std::nullopt, {}, 1e-7);
  fd::LineSearchParams params;
  params.gamma_min = 0.1;
  const fd::LineSearchOutcome out =
      fd::line_search(*model, w, bp.gains, bp.expected_decrease,
                      fd::Filter::with_cap(0.0), params, std::nullopt);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.rejections.size(), 4u);
}
