// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eddycurl/assembly.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/solver.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Controls for the constrained eigenpair computation.
struct EigenOptions {
  double tol = 1e-9;   ///< relative eigenpair residual target
  unsigned seed = 42;  ///< start-block seed (deterministic given the seed)
  int max_outer = 400; ///< outer iteration cap before declaring stagnation
  int buffer = 0;      ///< extra subspace columns; 0 chooses automatically
  double inner_rel_tol = 1e-12;  ///< inner linear-solve tolerance
  enum class Method { kAuto, kIterative, kDense };
  Method method = Method::kAuto;
};

/// The weighted divergence-free curl-curl eigenpairs with tangential boundary
/// condition.  Fields are stored as full edge vectors that vanish on boundary
/// edges; eigenvalues ascend and are nonnegative to rounding.
struct EigenBasis {
  Mat psis;          ///< n_edges x m, mu-orthonormal columns
  Vec lambdas;       ///< ascending eigenvalues
  Mat gram;          ///< (psi_i, psi_j) in the weighted inner product
  Mat curl_gram;     ///< (curl psi_i, curl psi_j) weighted; ~ diag(lambdas)
  Index dim_constraint = 0;  ///< dimension of the constrained subspace
  int outer_iterations = 0;  ///< outer iterations used (0 for the dense path)
  double max_residual = 0.0; ///< worst relative eigenpair residual at exit
};

namespace detail {

/// Projection onto the weighted divergence-free subspace, acting on
/// interior-edge coefficient vectors.
struct ConstraintProjector {
  const SpMat& l_mu_interior;
  SpMat b_int;   // interior-node constraint rows on interior edges
  SpMat g_int;   // interior-node gradients on interior edges
  const SpMat& m_int;
  IncompleteCholeskyPrecond precond;
  double rel_tol;

  ConstraintProjector(const Complex& cx, const WeightedForms& forms, const SpMat& m_int_,
                      double rel_tol_)
      : l_mu_interior(forms.l_mu_interior),
        m_int(m_int_),
        precond(forms.l_mu_interior),
        rel_tol(rel_tol_) {
    const SpMat pe = interior_edge_selector(cx);
    const SpMat pn = interior_node_selector(cx);
    b_int = forms.b_div * pe.transpose();
    g_int = pe * cx.grad * pn.transpose();
  }

  void operator()(Vec& v) const {
    CgOptions opts;
    opts.rel_tol = rel_tol;
    // A constraint residual at rounding level relative to the vector itself
    // means v already satisfies the constraint.
    opts.abs_tol = 1e-13 * (m_int * v).norm();
    Vec rhs = b_int * v;
    Vec z = Vec::Zero(rhs.size());
    solve_spd(l_mu_interior, rhs, z, precond, opts);
    v -= g_int * z;
  }
};

/// Two-pass modified Gram-Schmidt in the inner product induced by m.  Columns
/// whose norm collapses below drop_tol times their starting norm are flagged
/// in `kept` (when provided) and zeroed; otherwise collapse is an error.
inline void orthonormalize(const SpMat& m, Mat& x, std::vector<char>* kept = nullptr,
                           double drop_tol = 1e-8) {
  const Eigen::Index cols = x.cols();
  if (kept) kept->assign(size_t(cols), 1);
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < cols; ++j) {
    Vec v = x.col(j);
    const double norm0 = std::sqrt(std::max(0.0, v.dot(m * v)));
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i : live) v -= x.col(i).dot(m * v) * x.col(i);
    const double norm1 = std::sqrt(std::max(0.0, v.dot(m * v)));
    if (norm1 <= drop_tol * std::max(norm0, 1e-300)) {
      if (!kept)
        throw SolverError("orthonormalize: subspace column collapsed; basis is rank-deficient");
      (*kept)[size_t(j)] = 0;
      x.col(j).setZero();
      continue;
    }
    x.col(j) = v / norm1;
    live.push_back(j);
  }
}

/// Lexicographic sign convention: the first entry that is clearly nonzero is
/// made positive, so repeated runs agree beyond sign ambiguity.
inline void fix_sign(Mat& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double scale = x.col(j).lpNorm<Eigen::Infinity>();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (std::abs(x(i, j)) > 1e-8 * scale) {
        if (x(i, j) < 0.0) x.col(j) = -x.col(j);
        break;
      }
    }
  }
}

}  // namespace detail

/// Computes the m smallest eigenpairs of the weighted curl-curl operator on
/// the divergence-constrained interior-edge subspace, by block inverse
/// iteration on the mass-shifted operator; eigenvalues are recovered by
/// undoing the unit shift.  A dense Rayleigh-Ritz path handles requests for
/// (nearly) the full subspace.
inline EigenBasis magnetic_eigenbasis(const Complex& cx, const WeightedForms& forms, int m,
                                      const EigenOptions& opts = {}) {
  const SpMat pe = interior_edge_selector(cx);
  const SpMat k_int = SpMat(pe * forms.k_curlcurl_mu * pe.transpose());
  const SpMat m_int = SpMat(pe * forms.m_mu_edge * pe.transpose());
  const SpMat a_op = SpMat(k_int + m_int);
  const Index n_int = k_int.rows();
  const Index dim = n_int - Index(cx.interior_nodes.size());

  if (m < 1) throw ValidationError("magnetic_eigenbasis: mode count must be positive");
  if (Index(m) > dim)
    throw ValidationError("magnetic_eigenbasis: requested " + std::to_string(m) +
                          " modes but the constrained subspace has dimension " +
                          std::to_string(dim));

  detail::ConstraintProjector project(cx, forms, m_int, opts.inner_rel_tol);

  const int buffer = opts.buffer > 0 ? opts.buffer : std::max(3, m / 4);
  const Index nb = std::min<Index>(dim, Index(m) + buffer);
  const bool dense = opts.method == EigenOptions::Method::kDense ||
                     (opts.method == EigenOptions::Method::kAuto && nb >= dim - 1);

  Mat x;          // interior-edge columns spanning the current subspace
  int outer = 0;

  if (dense) {
    // Project the full interior identity and keep an orthonormal spanning set.
    Mat cand = Mat::Identity(n_int, n_int);
    for (Eigen::Index j = 0; j < cand.cols(); ++j) {
      Vec col = cand.col(j);
      project(col);
      cand.col(j) = col;
    }
    std::vector<char> kept;
    detail::orthonormalize(m_int, cand, &kept);
    Mat z(n_int, dim);
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < cand.cols(); ++j)
      if (kept[size_t(j)]) {
        if (w == dim)
          throw SolverError("magnetic_eigenbasis: constraint basis has excess rank");
        z.col(w++) = cand.col(j);
      }
    if (w != dim)
      throw SolverError("magnetic_eigenbasis: constraint basis rank " + std::to_string(w) +
                        " does not match expected dimension " + std::to_string(dim));
    Mat h = z.transpose() * (a_op * z).eval();
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
      throw SolverError("magnetic_eigenbasis: dense symmetric eigensolve failed");
    x = z * es.eigenvectors().leftCols(m);
  } else {
    // Random, projected, orthonormalized start block.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    x = Mat(n_int, nb);
    for (Eigen::Index j = 0; j < nb; ++j) {
      for (Index i = 0; i < n_int; ++i) x(i, j) = dist(rng);
      Vec col = x.col(j);
      project(col);
      x.col(j) = col;
    }
    detail::orthonormalize(m_int, x);

    IncompleteCholeskyPrecond precond(a_op);
    CgOptions inner;
    inner.rel_tol = opts.inner_rel_tol;

    Vec theta = Vec::Zero(nb);
    bool converged = false;
    for (outer = 1; outer <= opts.max_outer; ++outer) {
      // Inverse iteration step: y_j = (K + M)^{-1} M x_j, reprojected once to
      // counter constraint drift from the unconstrained inner solves.
      Mat y(n_int, nb);
      for (Eigen::Index j = 0; j < nb; ++j) {
        const Vec rhs = m_int * x.col(j);
        Vec sol = x.col(j) / std::max(1.0, theta[j]);  // warm start near the answer
        solve_spd(a_op, rhs, sol, precond, inner);
        project(sol);
        y.col(j) = sol;
      }
      detail::orthonormalize(m_int, y);

      // Rayleigh-Ritz on the block.
      Mat h = y.transpose() * (a_op * y).eval();
      h = 0.5 * (h + h.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      if (es.info() != Eigen::Success)
        throw SolverError("magnetic_eigenbasis: Rayleigh-Ritz eigensolve failed");
      x = y * es.eigenvectors();
      theta = es.eigenvalues();

      // Relative eigenpair residuals for the requested modes.
      double worst = 0.0;
      for (int j = 0; j < m; ++j) {
        const double lam = theta[j] - 1.0;
        const Vec r = k_int * x.col(j) - lam * (m_int * x.col(j));
        const double scale = (1.0 + std::abs(lam)) * (m_int * x.col(j)).norm();
        worst = std::max(worst, r.norm() / std::max(scale, 1e-300));
      }
      if (worst <= opts.tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw SolverError("magnetic_eigenbasis: eigen-iteration stagnation after " +
                        std::to_string(opts.max_outer) + " outer iterations");
    x = x.leftCols(m).eval();
  }

  detail::fix_sign(x);

  EigenBasis basis;
  basis.dim_constraint = dim;
  basis.outer_iterations = outer;
  basis.psis = pe.transpose() * x;
  basis.lambdas = Vec(m);
  basis.gram = Mat(m, m);
  basis.curl_gram = Mat(m, m);
  const Mat mx = m_int * x;
  const Mat kx = k_int * x;
  basis.gram = x.transpose() * mx;
  basis.curl_gram = x.transpose() * kx;
  for (int j = 0; j < m; ++j) basis.lambdas[j] = basis.curl_gram(j, j) / basis.gram(j, j);
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    const Vec r = kx.col(j) - basis.lambdas[j] * mx.col(j);
    const double scale = (1.0 + std::abs(basis.lambdas[j])) * mx.col(j).norm();
    worst = std::max(worst, r.norm() / std::max(scale, 1e-300));
  }
  basis.max_residual = worst;
  return basis;
}

/// Default threshold separating "numerically zero" eigenvalues: a small
/// multiple of the first clearly positive one.
inline double default_harmonic_tol(const EigenBasis& basis) {
  for (Eigen::Index i = 0; i < basis.lambdas.size(); ++i)
    if (basis.lambdas[i] > 1e-8) return 1e-6 * basis.lambdas[i];
  return 1e-6;
}

/// Counts eigenvalues at or below the harmonic threshold.  A threshold at or
/// above the first positive eigenvalue cannot distinguish harmonic fields from
/// genuine oscillation modes; that degenerate setting is reported as a
/// warning, not an error.
inline int harmonic_dimension(const EigenBasis& basis, double harmonic_tol,
                              std::vector<std::string>* warnings = nullptr) {
  int count = 0;
  for (Eigen::Index i = 0; i < basis.lambdas.size(); ++i)
    if (basis.lambdas[i] <= harmonic_tol) ++count;
  if (warnings) {
    for (Eigen::Index i = 0; i < basis.lambdas.size(); ++i)
      if (basis.lambdas[i] > 1e-8) {
        if (harmonic_tol >= basis.lambdas[i])
          warnings->push_back(
              "harmonic_dimension: threshold " + std::to_string(harmonic_tol) +
              " is not below the first positive eigenvalue " +
              std::to_string(basis.lambdas[i]) + "; counts are degenerate");
        break;
      }
  }
  return count;
}

/// Coefficients of an edge field against the basis in the weighted inner
/// product.  The input should vanish on boundary edges (the basis does).
inline Vec expand(const WeightedForms& forms, const EigenBasis& basis, const Vec& f) {
  if (f.size() != basis.psis.rows())
    throw ValidationError("expand: field length does not match the basis");
  return basis.psis.transpose() * (forms.m_mu_edge * f);
}

/// Linear combination of basis fields with the given coefficients.
inline Vec reconstruct(const EigenBasis& basis, const Vec& coeffs) {
  if (coeffs.size() != basis.psis.cols())
    throw ValidationError("reconstruct: coefficient length does not match the basis");
  return basis.psis * coeffs;
}

}  // namespace eddycurl
