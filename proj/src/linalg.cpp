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

#include "filterddp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace filterddp {

namespace {

// Growth bound for bounded Bunch-Kaufman pivoting.
const double kAlpha = (1.0 + std::sqrt(17.0)) / 8.0;

// Largest off-diagonal magnitude in column `col` of the active block
// A(k:, k:). Returns {value, row}; row is -1 when the block is 1x1.
std::pair<double, int> column_max(const MatrixXd& A, int k, int col) {
  double best = 0.0;
  int row = -1;
  for (int i = k; i < A.rows(); ++i) {
    if (i == col) {
      continue;
    }
    const double v = std::abs(A(i, col));
    if (row < 0 || v > best) {
      best = v;
      row = i;
    }
  }
  return {best, row};
}

// Symmetric interchange of rows/columns a and b (both >= k) of the working
// matrix, with matching row swaps in the computed part of L.
void interchange(MatrixXd& A, MatrixXd& M, MatrixXd& L,
                 std::vector<int>& perm, int k, int a, int b) {
  if (a == b) {
    return;
  }
  A.row(a).swap(A.row(b));
  A.col(a).swap(A.col(b));
  M.row(a).swap(M.row(b));
  M.col(a).swap(M.col(b));
  if (k > 0) {
    L.block(a, 0, 1, k).swap(L.block(b, 0, 1, k));
  }
  std::swap(perm[a], perm[b]);
}

// Copies the strict lower triangle of A(k:, k:) onto the upper one.
void mirror_lower(MatrixXd& A, int k) {
  const Eigen::Index n = A.rows() - k;
  A.bottomRightCorner(n, n).triangularView<Eigen::StrictlyUpper>() =
      A.bottomRightCorner(n, n).transpose();
}

// Eigenvalues of a symmetric 2x2 block.
Eigen::Vector2d block_eigenvalues(const Eigen::Matrix2d& d) {
  const double mean = 0.5 * (d(0, 0) + d(1, 1));
  const double half_diff = 0.5 * (d(0, 0) - d(1, 1));
  const double radius = std::hypot(half_diff, d(0, 1));
  return {mean - radius, mean + radius};
}

// With `relative` set, a pivot counts as zero when it is small against the
// accumulated magnitude of the terms that produced it (cancellation) or when
// it is below tol^2 outright. Otherwise the threshold is
// tol * max(1, ||K||_inf).
SymIndefFactor factor_impl(const MatrixXd& K, double zero_pivot_tol,
                           bool relative) {
  require(K.rows() == K.cols(), "ldlt_factor: matrix must be square");
  if (!K.allFinite()) {
    throw InputError("ldlt_factor: non-finite matrix entry");
  }
  const int m = static_cast<int>(K.rows());

  MatrixXd A = 0.5 * (K + K.transpose());
  SymIndefFactor f;
  f.L = MatrixXd::Identity(m, m);
  f.perm.resize(m);
  for (int i = 0; i < m; ++i) {
    f.perm[i] = i;
  }
  MatrixXd M = A.cwiseAbs();
  std::vector<double> rho;
  const double norm_inf =
      m > 0 ? A.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  f.zero_threshold = zero_pivot_tol * std::max(1.0, norm_inf);

  int k = 0;
  while (k < m) {
    const double diag = std::abs(A(k, k));
    auto [omega_k, r] = column_max(A, k, k);

    int pivot_size = 1;
    if (r < 0 || std::max(diag, omega_k) == 0.0 || diag >= kAlpha * omega_k) {
      // 1x1 pivot at k.
    } else {
      // Rook search: walk along column maxima until a diagonal entry is large
      // enough or two columns mutually hold their maxima.
      int i = k;
      double omega_i = omega_k;
      while (true) {
        auto [omega_r, p] = column_max(A, k, r);
        if (std::abs(A(r, r)) >= kAlpha * omega_r) {
          interchange(A, M, f.L, f.perm, k, k, r);
          break;
        }
        if (omega_r <= omega_i) {
          int second = r;
          interchange(A, M, f.L, f.perm, k, k, i);
          if (second == k) {
            second = i;
          }
          interchange(A, M, f.L, f.perm, k, k + 1, second);
          pivot_size = 2;
          break;
        }
        i = r;
        omega_i = omega_r;
        r = p;
      }
    }

    PivotBlock block;
    block.start = k;
    block.size = pivot_size;
    const int rest = m - k - pivot_size;
    if (pivot_size == 1) {
      const double d = A(k, k);
      block.d(0, 0) = d;
      if (d != 0.0 && rest > 0) {
        const VectorXd l = A.block(k + 1, k, rest, 1) / d;
        f.L.block(k + 1, k, rest, 1) = l;
        A.block(k + 1, k + 1, rest, rest).noalias() -= d * l * l.transpose();
        mirror_lower(A, k + 1);
        const VectorXd la = l.cwiseAbs();
        M.block(k + 1, k + 1, rest, rest).noalias() +=
            std::abs(d) * la * la.transpose();
      }
      rho.push_back(M(k, k));
    } else {
      Eigen::Matrix2d d = A.block<2, 2>(k, k);
      d(0, 1) = d(1, 0);
      block.d = d;
      if (rest > 0) {
        const MatrixXd W = A.block(k + 2, k, rest, 2);
        const double s = std::abs(d(1, 0));
        const MatrixXd l = W * ((d / s).inverse() / s);
        f.L.block(k + 2, k, rest, 2) = l;
        A.block(k + 2, k + 2, rest, rest).noalias() -= l * W.transpose();
        mirror_lower(A, k + 2);
        M.block(k + 2, k + 2, rest, rest).noalias() +=
            l.cwiseAbs() * W.cwiseAbs().transpose();
      }
      rho.push_back(M.block<2, 2>(k, k).maxCoeff());
    }
    f.blocks.push_back(block);
    k += pivot_size;
  }

  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  auto classify = [&](double lambda, double scale) {
    const double mag = std::abs(lambda);
    largest = std::max(largest, mag);
    smallest = std::min(smallest, mag);
    const double threshold =
        relative ? zero_pivot_tol * std::max(scale, zero_pivot_tol)
                 : f.zero_threshold;
    if (mag <= threshold) {
      ++f.inertia.zero;
    } else if (lambda > 0.0) {
      ++f.inertia.positive;
    } else {
      ++f.inertia.negative;
    }
  };
  for (std::size_t i = 0; i < f.blocks.size(); ++i) {
    const auto& b = f.blocks[i];
    if (b.size == 1) {
      classify(b.d(0, 0), rho[i]);
    } else {
      const Eigen::Vector2d ev = block_eigenvalues(b.d);
      classify(ev(0), rho[i]);
      classify(ev(1), rho[i]);
    }
  }
  if (m == 0) {
    f.condition = 1.0;
  } else if (f.inertia.zero > 0 || smallest == 0.0) {
    f.condition = std::numeric_limits<double>::infinity();
  } else {
    f.condition = largest / smallest;
  }
  return f;
}

}  // namespace

SymIndefFactor ldlt_factor(const MatrixXd& K, double zero_pivot_tol) {
  return factor_impl(K, zero_pivot_tol, false);
}

SymIndefFactor ldlt_factor_equilibrated(const MatrixXd& K,
                                        double zero_pivot_tol) {
  require(K.rows() == K.cols(), "ldlt_factor: matrix must be square");
  if (!K.allFinite()) {
    throw InputError("ldlt_factor: non-finite matrix entry");
  }
  const MatrixXd sym = 0.5 * (K + K.transpose());
  VectorXd scale = VectorXd::Ones(K.rows());
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    const double row = sym.row(i).lpNorm<Eigen::Infinity>();
    if (row > 0.0) {
      scale(i) = 1.0 / std::sqrt(row);
    }
  }
  SymIndefFactor f =
      factor_impl(scale.asDiagonal() * sym * scale.asDiagonal(),
                  zero_pivot_tol, true);
  f.scale = std::move(scale);
  return f;
}

MatrixXd SymIndefFactor::reconstruct() const {
  const int m = size();
  MatrixXd D = MatrixXd::Zero(m, m);
  for (const auto& b : blocks) {
    D.block(b.start, b.start, b.size, b.size) =
        b.d.topLeftCorner(b.size, b.size);
  }
  const MatrixXd M = L * D * L.transpose();
  MatrixXd K(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      K(perm[i], perm[j]) = M(i, j);
    }
  }
  if (scale.size() == m) {
    const VectorXd inv = scale.cwiseInverse();
    return inv.asDiagonal() * K * inv.asDiagonal();
  }
  return K;
}

MatrixXd ldlt_solve(const SymIndefFactor& factor, const MatrixXd& rhs) {
  const int m = factor.size();
  require(rhs.rows() == m, "ldlt_solve: right-hand side has wrong row count");
  if (factor.inertia.zero > 0) {
    throw SingularityError("ldlt_solve: factor has zero pivots");
  }
  const bool scaled = factor.scale.size() == m;
  MatrixXd y(m, rhs.cols());
  for (int i = 0; i < m; ++i) {
    y.row(i) = rhs.row(factor.perm[i]);
    if (scaled) {
      y.row(i) *= factor.scale(factor.perm[i]);
    }
  }
  factor.L.triangularView<Eigen::UnitLower>().solveInPlace(y);
  for (const auto& b : factor.blocks) {
    if (b.size == 1) {
      y.row(b.start) /= b.d(0, 0);
    } else {
      const double s = std::abs(b.d(1, 0));
      y.middleRows(b.start, 2) =
          ((b.d / s).inverse() / s) * y.middleRows(b.start, 2);
    }
  }
  factor.L.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(y);
  MatrixXd x(m, rhs.cols());
  for (int i = 0; i < m; ++i) {
    x.row(factor.perm[i]) = y.row(i);
  }
  if (scaled) {
    x = factor.scale.asDiagonal() * x;
  }
  return x;
}

MatrixXd contract_first(const VectorXd& v, const Tensor3& T, int rows,
                        int cols) {
  MatrixXd out = MatrixXd::Zero(rows, cols);
  if (T.empty()) {
    return out;
  }
  require(static_cast<int>(T.size()) == v.size(),
          "contract_first: vector length does not match tensor depth");
  for (std::size_t k = 0; k < T.size(); ++k) {
    require(T[k].rows() == rows && T[k].cols() == cols,
            "contract_first: tensor slice has wrong shape");
    out.noalias() += v(static_cast<Eigen::Index>(k)) * T[k];
  }
  return out;
}

MatrixXd contract_first(const VectorXd& v, const Tensor3& T) {
  require(!T.empty(), "contract_first: empty tensor needs an explicit shape");
  return contract_first(v, T, static_cast<int>(T[0].rows()),
                        static_cast<int>(T[0].cols()));
}

}  // namespace filterddp
