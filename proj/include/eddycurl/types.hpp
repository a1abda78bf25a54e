// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eddycurl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Index = std::int64_t;

/// Structural problems with inputs: bad grid sizes, infeasible materials,
/// incompatible boundary data, malformed configs.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative solver failures; carries the residual history of the failed run.
struct SolverError : std::runtime_error {
  std::vector<double> residual_history;
  explicit SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), residual_history(std::move(history)) {}
};

/// A verification harness found a violated estimate or identity.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eddycurl
