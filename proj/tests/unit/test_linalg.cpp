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


#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "filterddp/linalg.hpp"

namespace fd = filterddp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = g(rng);
    }
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

TEST(LdltFactor, IdentityIsPositiveDefinite) {
  EXPECT_EQ(fd::ldlt_factor(MatrixXd::Identity(2, 2)).inertia,
            (fd::Inertia{2, 0, 0}));
}

TEST(LdltFactor, SignedDiagonal) {
  EXPECT_EQ(fd::ldlt_factor(mat2(2, 0, 0, -3)).inertia, (fd::Inertia{1, 1, 0}));
}

TEST(LdltFactor, ZeroDiagonalNeedsTwoByTwoPivot) {
  const fd::SymIndefFactor f = fd::ldlt_factor(mat2(0, 1, 1, 0));
  EXPECT_EQ(f.inertia, (fd::Inertia{1, 1, 0}));
  EXPECT_LT((f.reconstruct() - mat2(0, 1, 1, 0)).norm(), 1e-14);
}

TEST(LdltFactor, RankOneHasZeroPivot) {
  const fd::SymIndefFactor f = fd::ldlt_factor(mat2(1, 1, 1, 1));
  EXPECT_EQ(f.inertia, (fd::Inertia{1, 0, 1}));
  EXPECT_FALSE(std::isfinite(f.condition));
}

TEST(LdltFactor, RejectsNonFiniteEntries) {
  EXPECT_THROW(fd::ldlt_factor(mat2(1, NAN, NAN, 1)), fd::InputError);
}

TEST(LdltFactor, RejectsNonSquare) {
  EXPECT_THROW(fd::ldlt_factor(MatrixXd::Zero(2, 3)), fd::ContractViolation);
}

TEST(LdltFactor, ReconstructsRandomIndefinite) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 9; ++n) {
    const MatrixXd K = random_symmetric(rng, n);
    const fd::SymIndefFactor f = fd::ldlt_factor(K);
    EXPECT_LT((f.reconstruct() - K).norm(), 1e-10 * (1.0 + K.norm())) << n;
    const fd::SymIndefFactor g = fd::ldlt_factor_equilibrated(K);
    EXPECT_LT((g.reconstruct() - K).norm(), 1e-10 * (1.0 + K.norm())) << n;
    EXPECT_EQ(f.inertia, g.inertia);
  }
}

TEST(LdltSolve, Identity) {
  const VectorXd b = VectorXd::LinSpaced(3, 1.0, 3.0);
  const MatrixXd x = fd::ldlt_solve(fd::ldlt_factor(MatrixXd::Identity(3, 3)), b);
  EXPECT_LT((x - b).norm(), 1e-15);
}

TEST(LdltSolve, HandInverse) {
  const MatrixXd x =
      fd::ldlt_solve(fd::ldlt_factor(mat2(1, 1, 1, 0)), VectorXd::Unit(2, 0));
  EXPECT_NEAR(x(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 1.0, 1e-15);
}

TEST(LdltSolve, SingularFactorThrows) {
  EXPECT_THROW(
      fd::ldlt_solve(fd::ldlt_factor(mat2(1, 1, 1, 1)), VectorXd::Ones(2)),
      fd::SingularityError);
}

TEST(LdltSolve, MatchesDenseLuOnSpd) {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 8; ++n) {
    const MatrixXd G = random_symmetric(rng, n);
    const MatrixXd K = G * G + MatrixXd::Identity(n, n);
    const MatrixXd rhs = random_symmetric(rng, n).leftCols(3);
    const MatrixXd x = fd::ldlt_solve(fd::ldlt_factor(K), rhs);
    EXPECT_LT((x - K.partialPivLu().solve(rhs)).norm(), 1e-10);
  }
}

TEST(ContractFirst, ZeroVector) {
  const fd::Tensor3 T{MatrixXd::Ones(2, 3), MatrixXd::Ones(2, 3)};
  EXPECT_EQ(fd::contract_first(VectorXd::Zero(2), T), MatrixXd::Zero(2, 3));
}

TEST(ContractFirst, SingleSliceScales) {
  const fd::Tensor3 T{MatrixXd::Identity(2, 2)};
  EXPECT_EQ(fd::contract_first(VectorXd::Constant(1, 2.0), T),
            2.0 * MatrixXd::Identity(2, 2));
}

TEST(ContractFirst, MatchesTripleLoop) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int p = 4, a = 3, b = 5;
  fd::Tensor3 T(p, MatrixXd(a, b));
  VectorXd v(p);
  for (int k = 0; k < p; ++k) {
    v(k) = g(rng);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) {
        T[k](i, j) = g(rng);
      }
    }
  }
  MatrixXd expected = MatrixXd::Zero(a, b);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) {
      for (int k = 0; k < p; ++k) {
        expected(i, j) += v(k) * T[k](i, j);
      }
    }
  }
  EXPECT_LT((fd::contract_first(v, T) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ContractFirst, ShapeMismatchThrows) {
  const fd::Tensor3 T{MatrixXd::Identity(2, 2)};
  EXPECT_THROW(fd::contract_first(VectorXd::Ones(2), T), fd::ContractViolation);
}
