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

#include <Eigen/Core>

#include "filterddp/common.hpp"

namespace filterddp {

/// Eigenvalue sign counts of a symmetric matrix.
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  bool operator==(const Inertia&) const = default;
};

/// A 1x1 or 2x2 diagonal block of D, starting at row `start` of the
/// permuted matrix.
struct PivotBlock {
  int start = 0;
  int size = 1;
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
};

/**
 * Symmetric indefinite factorization P^T K P = L D L^T with L unit lower
 * triangular and D block diagonal (1x1 and 2x2 blocks), computed with
 * bounded Bunch-Kaufman (rook) pivoting.
 */
struct SymIndefFactor {
  MatrixXd L;
  std::vector<PivotBlock> blocks;
  /// perm[i] is the row of K placed at position i.
  std::vector<int> perm;
  Inertia inertia;
  /// max |pivot eigenvalue| / min |pivot eigenvalue|; infinite when singular.
  double condition = 0.0;
  double zero_threshold = 0.0;
  /// Diagonal S when the factored matrix was S K S; empty otherwise.
  VectorXd scale;

  int size() const { return static_cast<int>(perm.size()); }

  /// P L D L^T P^T, i.e. the (symmetrized) input matrix.
  MatrixXd reconstruct() const;
};

constexpr double kDefaultZeroPivotTol = 1e-12;

/**
 * Factors the symmetric part (K + K^T)/2. Pivot-block eigenvalues with
 * magnitude <= zero_pivot_tol * max(1, ||K||_inf) count as zero.
 *
 * Throws InputError on non-finite entries, ContractViolation if K is not
 * square.
 */
SymIndefFactor ldlt_factor(const MatrixXd& K,
                           double zero_pivot_tol = kDefaultZeroPivotTol);

/**
 * Factors S K S with S_ii = 1 / sqrt(||K_i||_inf) (rows of zeros keep
 * S_ii = 1). Inertia is unchanged by the congruence, but the zero-pivot test
 * then compares pivots against the scale of their own rows rather than the
 * largest entry of K. Solves and reconstruct() undo the scaling.
 */
SymIndefFactor ldlt_factor_equilibrated(
    const MatrixXd& K, double zero_pivot_tol = kDefaultZeroPivotTol);

/// Solves K X = rhs. Throws SingularityError if the factor has zero pivots.
MatrixXd ldlt_solve(const SymIndefFactor& factor, const MatrixXd& rhs);

/// result = sum_k v[k] * T[k]. An empty tensor contracts to a zero matrix of
/// the given shape.
MatrixXd contract_first(const VectorXd& v, const Tensor3& T, int rows,
                        int cols);
MatrixXd contract_first(const VectorXd& v, const Tensor3& T);

}  // namespace filterddp
