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

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace filterddp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One vector per stage, indexed t = 0..N-1.
using Trajectory = std::vector<VectorXd>;

/// Rank-3 array stored as slices: T[k] is an (a x b) matrix, k = 0..p-1.
using Tensor3 = std::vector<MatrixXd>;

/// Inputs that break a documented precondition (shape mismatch etc.).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or otherwise unusable numeric input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Function evaluated outside its domain (log of a nonpositive control).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Linear solve requested on a factorization with zero pivots.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base class for conditions that make the solver stop with a failure status.
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inertia correction needed a primal shift above the configured maximum.
class RegularizationOverflow : public SolverAbort {
 public:
  using SolverAbort::SolverAbort;
};

/// Stage KKT matrix too ill conditioned after inertia correction.
class IllConditioned : public SolverAbort {
 public:
  using SolverAbort::SolverAbort;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) {
    throw ContractViolation(message);
  }
}

}  // namespace filterddp
