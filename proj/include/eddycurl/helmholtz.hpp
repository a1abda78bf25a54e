// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "eddycurl/assembly.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/reconstruct.hpp"
#include "eddycurl/solver.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Result of the unweighted splitting F = grad u + eta with eta orthogonal to
/// every discrete gradient in the plain L2 pairing.
struct NeumannSplit {
  Vec u;            ///< nodal potential, zero volume-weighted mean
  Vec eta;          ///< gradient-free remainder, same length as F
  double norm_field = 0.0;  ///< L2 norm of the input field
  double norm_grad = 0.0;   ///< L2 norm of grad u
  double norm_eta = 0.0;    ///< L2 norm of eta
  CgResult solve;           ///< iteration record of the potential solve
};

/// Result of the mu-weighted splitting F = grad q + zeta with q vanishing on
/// the boundary and zeta in the weighted divergence-free subspace.  Norms are
/// reported both unweighted (for the Lambda-factor bounds) and mu-weighted
/// (where the split is orthogonal).
struct DirichletSplit {
  Vec q;            ///< nodal potential, zero on all boundary nodes
  Vec zeta;         ///< weighted divergence-free remainder
  double norm_field = 0.0;    ///< L2 norm of the input field
  double norm_grad = 0.0;     ///< L2 norm of grad q
  double norm_zeta = 0.0;     ///< L2 norm of zeta
  double norm_field_w = 0.0;  ///< mu-weighted norm of the input field
  double norm_grad_w = 0.0;   ///< mu-weighted norm of grad q
  double norm_zeta_w = 0.0;   ///< mu-weighted norm of zeta
  CgResult solve;             ///< iteration record of the potential solve
};

namespace detail {

inline double weighted_norm(const SpMat& m, const Vec& v) {
  return std::sqrt(std::max(0.0, v.dot(m * v)));
}

}  // namespace detail

/// Splits an edge field against the full nodal gradient space.  The potential
/// solves the standard Neumann problem, pinned by removing the volume-weighted
/// mean, so the remainder satisfies G^T M eta = 0 at every node.
inline NeumannSplit neumann_decompose(const Complex& cx, const WeightedForms& forms,
                                      const Vec& f, const CgOptions& opts = {}) {
  if (f.size() != cx.n_edges)
    throw ValidationError("neumann_decompose: field length does not match edge count");
  NeumannSplit out;
  const Vec rhs = cx.grad.transpose() * (forms.m_edge * f);
  Vec u = Vec::Zero(cx.n_nodes);
  JacobiPrecond precond(forms.l_node);
  CgOptions local = opts;
  // A right-hand side at rounding level relative to the field itself means the
  // gradient part is zero; don't chase noise below that floor.
  local.abs_tol = std::max(local.abs_tol, 1e-13 * (forms.m_edge * f).norm());
  out.solve = solve_spd(forms.l_node, rhs, u, precond, local,
                        mean_deflation(forms.node_volumes));
  out.u = u;
  out.eta = f - cx.grad * u;
  out.norm_field = detail::weighted_norm(forms.m_edge, f);
  out.norm_grad = detail::weighted_norm(forms.m_edge, Vec(cx.grad * u));
  out.norm_eta = detail::weighted_norm(forms.m_edge, out.eta);
  return out;
}

/// Splits an edge field against gradients of potentials that vanish on the
/// boundary, using the mu-weighted pairing.  The remainder zeta satisfies
/// the weighted divergence condition B zeta = 0 at interior nodes, i.e. it
/// lies in the constraint space used by the field evolution.
inline DirichletSplit weighted_dirichlet_decompose(const Complex& cx,
                                                   const WeightedForms& forms,
                                                   const Vec& f,
                                                   const CgOptions& opts = {}) {
  if (f.size() != cx.n_edges)
    throw ValidationError("weighted_dirichlet_decompose: field length does not match edge count");
  DirichletSplit out;
  const Vec rhs = forms.b_div * f;
  Vec q_int = Vec::Zero(rhs.size());
  IncompleteCholeskyPrecond precond(forms.l_mu_interior);
  CgOptions local = opts;
  local.abs_tol = std::max(local.abs_tol, 1e-13 * (forms.m_mu_edge * f).norm());
  out.solve = solve_spd(forms.l_mu_interior, rhs, q_int, precond, local);
  out.q = interior_node_selector(cx).transpose() * q_int;
  out.zeta = f - cx.grad * out.q;
  const Vec grad_q = cx.grad * out.q;
  out.norm_field = detail::weighted_norm(forms.m_edge, f);
  out.norm_grad = detail::weighted_norm(forms.m_edge, grad_q);
  out.norm_zeta = detail::weighted_norm(forms.m_edge, out.zeta);
  out.norm_field_w = detail::weighted_norm(forms.m_mu_edge, f);
  out.norm_grad_w = detail::weighted_norm(forms.m_mu_edge, grad_q);
  out.norm_zeta_w = detail::weighted_norm(forms.m_mu_edge, out.zeta);
  return out;
}

/// Projects an edge field onto the weighted divergence-free subspace by
/// subtracting the Dirichlet gradient part.  Interior-supported fields stay
/// interior-supported because the subtracted gradient has zero boundary trace.
inline Vec xmu_project(const Complex& cx, const WeightedForms& forms, const Vec& f,
                       const CgOptions& opts = {}) {
  return weighted_dirichlet_decompose(cx, forms, f, opts).zeta;
}

/// Diagnostic quantities comparing the curl/divergence/L2 energy of a
/// tangential-boundary edge field with the full gradient energy of its
/// node-reconstructed form.
struct GaffneyReport {
  double norm_l2 = 0.0;    ///< L2 norm of the field
  double norm_curl = 0.0;  ///< L2 norm of the cochain curl
  double norm_div = 0.0;   ///< L2 norm of the reconstructed divergence
  double norm_grad = 0.0;  ///< Frobenius L2 norm of the reconstructed gradient
  double ratio = 0.0;  ///< (norm_div^2 + norm_curl^2 + norm_l2^2) / norm_grad^2
};

/// Measures how well the curl-divergence-L2 energy controls the reconstructed
/// gradient energy for a field with zero tangential boundary values.  The
/// gradient is formed by averaging edge values to nodes and taking difference
/// quotients per cell; the divergence is its trace.  Requires an
/// interior-supported, nonzero field.
inline GaffneyReport gaffney_ratio(const Complex& cx, const WeightedForms& forms,
                                   const Vec& f) {
  if (f.size() != cx.n_edges)
    throw ValidationError("gaffney_ratio: field length does not match edge count");
  for (Index e = 0; e < cx.n_edges; ++e)
    if (cx.edge_on_boundary[size_t(e)] && f[e] != 0.0)
      throw ValidationError("gaffney_ratio: field must vanish on boundary edges");
  GaffneyReport out;
  out.norm_l2 = detail::weighted_norm(forms.m_edge, f);
  if (out.norm_l2 == 0.0)
    throw ValidationError("gaffney_ratio: zero field has no meaningful ratio");
  const Vec curl_f = cx.curl * f;
  out.norm_curl = detail::weighted_norm(forms.m_face, curl_f);

  const Mat nodal = edge_to_nodes(cx, f);
  const Mat grad = nodal_gradient_at_cells(cx, nodal);
  const double vc = cx.spec.cell_volume();
  double grad_sq = 0.0;
  double div_sq = 0.0;
  for (Index c = 0; c < cx.n_cells; ++c) {
    double div_c = 0.0;
    for (int a = 0; a < 3; ++a) {
      div_c += grad(c, 3 * a + a);
      for (int d = 0; d < 3; ++d) grad_sq += vc * grad(c, 3 * a + d) * grad(c, 3 * a + d);
    }
    div_sq += vc * div_c * div_c;
  }
  out.norm_grad = std::sqrt(grad_sq);
  out.norm_div = std::sqrt(div_sq);
  if (grad_sq == 0.0)
    throw ValidationError("gaffney_ratio: reconstructed gradient vanishes; ratio undefined");
  out.ratio = (div_sq + out.norm_curl * out.norm_curl + out.norm_l2 * out.norm_l2) / grad_sq;
  return out;
}

/// Gradient energy of the node-reconstructed form of an edge field (no
/// boundary restriction applied); used to compare the smooth part of a split
/// against the discrete curl of its source field.
inline double reconstructed_gradient_norm(const Complex& cx, const Vec& f) {
  if (f.size() != cx.n_edges)
    throw ValidationError("reconstructed_gradient_norm: field length does not match edge count");
  const Mat nodal = edge_to_nodes(cx, f);
  const Mat grad = nodal_gradient_at_cells(cx, nodal);
  const double vc = cx.spec.cell_volume();
  double grad_sq = 0.0;
  for (Index c = 0; c < cx.n_cells; ++c)
    for (int t = 0; t < 9; ++t) grad_sq += vc * grad(c, t) * grad(c, t);
  return std::sqrt(grad_sq);
}

}  // namespace eddycurl
