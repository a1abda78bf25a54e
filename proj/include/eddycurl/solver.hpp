// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "eddycurl/types.hpp"

namespace eddycurl {

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iterations = 0;  // 0: choose from the problem size
  // Absolute residual floor: convergence is declared at
  // |r| <= max(rel_tol * |b|, abs_tol).  Guards solves whose right-hand side
  // is cancellation noise from a much larger source field.
  double abs_tol = 0.0;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Largest |A - A^T| entry relative to the largest |A| entry.
inline double symmetry_residual(const SpMat& a) {
  const SpMat d = SpMat(a.transpose()) - a;
  double num = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) num = std::max(num, std::abs(it.value()));
  double den = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) den = std::max(den, std::abs(it.value()));
  return den > 0.0 ? num / den : num;
}

struct IdentityPrecond {
  Vec operator()(const Vec& r) const { return r; }
};

struct JacobiPrecond {
  Vec inv_diag;
  explicit JacobiPrecond(const SpMat& a) {
    inv_diag = a.diagonal();
    for (Eigen::Index i = 0; i < inv_diag.size(); ++i)
      inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 1.0;
  }
  Vec operator()(const Vec& r) const { return inv_diag.cwiseProduct(r); }
};

/// Incomplete-Cholesky preconditioner (factorization backend from Eigen).
struct IncompleteCholeskyPrecond {
  Eigen::IncompleteCholesky<double> ic;
  bool ok = false;
  JacobiPrecond fallback;
  explicit IncompleteCholeskyPrecond(const SpMat& a) : fallback(a) {
    ic.compute(a);
    ok = ic.info() == Eigen::Success;
  }
  Vec operator()(const Vec& r) const { return ok ? Vec(ic.solve(r)) : fallback(r); }
};

/// Projector applied to primal vectors to keep iterates in a constraint
/// kernel (or to deflate a nullspace).  Identity when empty.
using Projector = std::function<void(Vec&)>;

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator.  When `project` is supplied, the start vector and every
/// preconditioned residual are projected, so all iterates stay in the
/// constraint kernel; the right-hand side must be consistent with it.
/// Throws SolverError (with the residual history) when tolerance is not met.
template <class Precond>
CgResult solve_spd(const SpMat& a, const Vec& b, Vec& x, const Precond& precond,
                   const CgOptions& opts = {}, const Projector& project = {}) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw ValidationError("solve_spd: dimension mismatch");
  const double sym = symmetry_residual(a);
  if (sym > 1e-12)
    throw ValidationError("solve_spd: operator symmetry residual " + std::to_string(sym) +
                          " exceeds 1e-12");

  const Eigen::Index n = a.rows();
  const int max_it =
      opts.max_iterations > 0 ? opts.max_iterations : int(std::max<Eigen::Index>(4 * n, 1000));

  if (x.size() != n) x = Vec::Zero(n);
  if (project) project(x);

  const double bnorm = b.norm();
  CgResult res;
  if (bnorm == 0.0 || bnorm <= opts.abs_tol) {
    x.setZero();
    if (project) project(x);
    res.relative_residual = 0.0;
    return res;
  }
  const double target = std::max(opts.rel_tol, opts.abs_tol / bnorm);

  Vec r = b - a * x;
  Vec z = precond(r);
  if (project) project(z);
  Vec p = z;
  double rz = r.dot(z);

  double rel = r.norm() / bnorm;
  res.history.push_back(rel);
  for (int it = 0; it < max_it && rel > target; ++it) {
    const Vec ap = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      throw SolverError("solve_spd: operator not positive definite on the search space",
                        res.history);
    }
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    rel = r.norm() / bnorm;
    res.history.push_back(rel);
    ++res.iterations;
    if (rel <= target) break;
    z = precond(r);
    if (project) project(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.relative_residual = rel;
  if (rel > target)
    throw SolverError("solve_spd: no convergence to rel tol " + std::to_string(opts.rel_tol) +
                          " in " + std::to_string(res.iterations) + " iterations",
                      res.history);
  return res;
}

inline CgResult solve_spd(const SpMat& a, const Vec& b, Vec& x, const CgOptions& opts = {},
                          const Projector& project = {}) {
  return solve_spd(a, b, x, JacobiPrecond(a), opts, project);
}

/// Deflation projector removing the weighted mean: v -= (w.v / w.1) 1.
inline Projector mean_deflation(const Vec& weights) {
  const double total = weights.sum();
  return [weights, total](Vec& v) { v.array() -= weights.dot(v) / total; };
}

}  // namespace eddycurl
