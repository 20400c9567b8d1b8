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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "filterddp/benchmarks.hpp"
#include "filterddp/ocp.hpp"
#include "filterddp/solver.hpp"
#include "toy_models.hpp"

namespace fd = filterddp;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    out(i++) = x;
  }
  return out;
}

fd::Iterate start(const fd::OcpModel& model) {
  fd::Iterate w = fd::Iterate::zeros(model.dims());
  w.x = fd::simulate(model, w.u);
  return w;
}

}  // namespace

TEST(Dims, Validate) {
  EXPECT_NO_THROW((fd::Dims{3, 2, 2, 2}.validate()));
  EXPECT_THROW((fd::Dims{0, 2, 2, 0}.validate()), fd::ContractViolation);
  EXPECT_THROW((fd::Dims{3, 2, 1, 2}.validate()), fd::ContractViolation);
  EXPECT_THROW((fd::Dims{3, 2, 1, -1}.validate()), fd::ContractViolation);
}

TEST(EvaluateTheta, FeasiblePointIsZero) {
  const auto model = fd::testing::constant_constraints(1, {vec({0.0}), vec({0.0})});
  const fd::Iterate w = start(*model);
  EXPECT_EQ(fd::evaluate_theta(*model, w.x, w.u), 0.0);
}

TEST(EvaluateTheta, SumsAbsoluteValues) {
  const auto model = fd::testing::constant_constraints(
      2, {vec({1.0, -2.0}), vec({0.5, 0.0})});
  const fd::Iterate w = start(*model);
  EXPECT_DOUBLE_EQ(fd::evaluate_theta(*model, w.x, w.u), 3.5);
}

TEST(EvaluateTheta, MatchesResummation) {
  const auto model = fd::build_eqlq(17, 6, 3, 3, 2);
  fd::Iterate w = start(*model);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& u : w.u) {
    for (auto& v : u) {
      v = g(rng);
    }
  }
  w.x = fd::simulate(*model, w.u);
  double expected = 0.0;
  for (int t = 0; t < model->dims().N; ++t) {
    expected += model->constraints(t, w.x[t], w.u[t]).lpNorm<1>();
  }
  EXPECT_NEAR(fd::evaluate_theta(*model, w.x, w.u), expected, 1e-14 * expected);
}

TEST(EvaluateTheta, DimensionMismatchThrows) {
  const auto model = fd::build_eqlq(17, 6, 3, 3, 2);
  fd::Iterate w = start(*model);
  w.u.pop_back();
  EXPECT_THROW(fd::evaluate_theta(*model, w.x, w.u), fd::ContractViolation);
}

TEST(EvaluateLagrangian, ZeroMultipliersGiveCost) {
  const auto model = fd::build_eqlq(3, 5, 2, 2, 1);
  const fd::Iterate w = start(*model);
  EXPECT_DOUBLE_EQ(fd::evaluate_lagrangian(*model, w.x, w.u, w.phi),
                   fd::evaluate_cost(*model, w.x, w.u));
}

TEST(EvaluateLagrangian, AccumulatesMultiplierTerms) {
  const auto model = fd::testing::constant_constraints(
      1, {vec({2.0}), vec({2.0}), vec({2.0})});
  fd::Iterate w = start(*model);
  for (auto& p : w.phi) {
    p.setConstant(1.0);
  }
  EXPECT_DOUBLE_EQ(fd::evaluate_lagrangian(*model, w.x, w.u, w.phi), 6.0);
}

TEST(EvaluateLagrangian, BarrierTerm) {
  const auto base = fd::testing::scalar_lq(1, 1.0, 1.0, 0.0, 0.0, 0.0);
  const fd::testing::MaskedLq model(*base, {true});
  fd::Iterate w = start(model);
  w.u[0](0) = 1.0;
  EXPECT_EQ(fd::evaluate_lagrangian(model, w.x, w.u, w.phi, 1.0), 0.0);
  w.u[0](0) = std::exp(2.0);
  EXPECT_NEAR(fd::evaluate_lagrangian(model, w.x, w.u, w.phi, 0.5), -1.0, 1e-14);
  w.u[0](0) = 0.0;
  EXPECT_THROW(fd::evaluate_lagrangian(model, w.x, w.u, w.phi, 1.0),
               fd::DomainError);
}

TEST(DerivativeCheck, ExactLinearQuadratic) {
  const auto model = fd::build_eqlq(5, 4, 3, 2, 1);
  fd::Iterate w = start(*model);
  for (auto& p : w.phi) {
    p.setConstant(0.7);
  }
  const fd::DerivativeCheckReport r =
      fd::derivative_check(*model, w.x, w.u, w.phi, 1e-5);
  EXPECT_LE(r.error("dynamics_x"), 1e-9);
  EXPECT_LE(r.error("dynamics_u"), 1e-9);
  EXPECT_LE(r.max_error(), 1e-7);
}

TEST(DerivativeCheck, DetectsCorruptedJacobian) {
  const auto base = fd::build_eqlq(5, 4, 3, 2, 1);
  const fd::testing::CorruptedLq model(*base, 0.1);
  const fd::Iterate w = start(model);
  const fd::DerivativeCheckReport r =
      fd::derivative_check(model, w.x, w.u, w.phi, 1e-5);
  EXPECT_GE(r.error("dynamics_u"), 0.01);
  EXPECT_LE(r.error("dynamics_x"), 1e-9);
}

TEST(KktResiduals, ZeroProblemAtRest) {
  const auto model = fd::testing::scalar_lq(4, 1.0, 1.0, 0.0, 0.0, 0.0);
  const fd::Iterate w = start(*model);
  EXPECT_EQ(fd::kkt_residuals(*model, w).max_abs(), 0.0);
  EXPECT_EQ(fd::optimality_error(*model, w), 0.0);
}

TEST(KktResiduals, OracleSolution) {
  const auto model = fd::build_eqlq(21, 6, 3, 3, 2);
  const fd::Iterate w = fd::stacked_kkt_oracle(*model);
  EXPECT_LT(fd::kkt_residuals(*model, w).max_abs(), 1e-10);
  EXPECT_LT(fd::optimality_error(*model, w), 1e-10);
}

TEST(KktResiduals, ControlGradientMatchesFiniteDifference) {
  const auto model = fd::build_eqlq(8, 4, 2, 3, 1);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  fd::Iterate w = start(*model);
  for (int t = 0; t < model->dims().N; ++t) {
    for (auto& v : w.u[t]) v = g(rng);
    for (auto& v : w.x[t]) v = g(rng);
    for (auto& v : w.phi[t]) v = g(rng);
  }
  w.lambda.assign(model->dims().N, VectorXd::Zero(2));
  for (auto& l : w.lambda) {
    for (auto& v : l) v = g(rng);
  }
  // Full Lagrangian with the dynamics coupled through lambda.
  auto full = [&](const fd::Iterate& it) {
    double v = fd::evaluate_lagrangian(*model, it.x, it.u, it.phi);
    for (int t = 0; t + 1 < model->dims().N; ++t) {
      v += it.lambda[t + 1].dot(model->dynamics(t, it.x[t], it.u[t]) -
                                it.x[t + 1]);
    }
    return v;
  };
  const fd::KktResiduals r = fd::kkt_residuals(*model, w);
  const double h = 1e-6;
  for (int t = 0; t < model->dims().N; ++t) {
    for (int i = 0; i < 3; ++i) {
      fd::Iterate p = w, m = w;
      p.u[t](i) += h;
      m.u[t](i) -= h;
      EXPECT_NEAR(r.grad_u[t](i), (full(p) - full(m)) / (2 * h), 1e-6);
    }
  }
}

TEST(OptimalityError, MaxOfNorms) {
  std::vector<fd::LqModel::Stage> stages(1);
  fd::LqModel::Stage& s = stages[0];
  s.A = Eigen::MatrixXd::Identity(1, 1);
  s.B = Eigen::MatrixXd::Zero(1, 2);
  s.e = VectorXd::Zero(1);
  s.W = Eigen::MatrixXd::Zero(3, 3);
  s.q = VectorXd::Zero(1);
  s.r = vec({0.3, -0.7});
  s.C = Eigen::MatrixXd::Zero(0, 1);
  s.D = Eigen::MatrixXd::Zero(0, 2);
  s.d = VectorXd::Zero(0);
  const fd::LqModel model({1, 1, 2, 0}, VectorXd::Zero(1), stages);
  EXPECT_DOUBLE_EQ(fd::optimality_error(model, start(model)), 0.7);
}

TEST(RefreshMerit, CachesThetaAndLagrangian) {
  const auto model = fd::build_eqlq(3, 5, 2, 2, 1);
  fd::Iterate w = start(*model);
  fd::refresh_merit(*model, w, 0.0);
  EXPECT_EQ(w.theta, fd::evaluate_theta(*model, w.x, w.u));
  EXPECT_EQ(w.lagrangian, fd::evaluate_lagrangian(*model, w.x, w.u, w.phi));
}
