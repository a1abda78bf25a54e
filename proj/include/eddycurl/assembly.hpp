// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "eddycurl/grid.hpp"
#include "eddycurl/materials.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {
namespace detail {

// Per-axis factor of a lowest-order basis function on the reference cell:
// constant 1, or the hat ells l0 = 1-t, l1 = t.
enum class Fac : int { one = -1, l0 = 0, l1 = 1 };

inline double pair_integral_1d(Fac a, Fac b, double h) {
  if (a == Fac::one && b == Fac::one) return h;
  if (a == Fac::one || b == Fac::one) return 0.5 * h;
  return a == b ? h / 3.0 : h / 6.0;
}

inline std::array<int, 2> transverse_axes(int d) {
  switch (d) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

/// Cell-independent descriptors of the 12 edge (Nedelec) and 6 face
/// (Raviart-Thomas) basis functions on a uniform cell, plus all pairwise
/// integrals.  Edge function local index: 4*axis + 2*ov + ou; face: 2*axis + a.
struct CellTables {
  std::array<int, 12> e_comp{};
  std::array<std::array<Fac, 3>, 12> e_fac{};
  std::array<double, 12> e_pref{};
  std::array<int, 6> f_comp{};
  std::array<std::array<Fac, 3>, 6> f_fac{};
  std::array<double, 6> f_pref{};
  double ee[12][12] = {};
  double ff[6][6] = {};
  double fe[6][12] = {};

  explicit CellTables(const GridSpec& g) {
    for (int d = 0; d < 3; ++d) {
      auto [u, v] = transverse_axes(d);
      for (int ov = 0; ov < 2; ++ov)
        for (int ou = 0; ou < 2; ++ou) {
          const int le = 4 * d + 2 * ov + ou;
          e_comp[le] = d;
          e_fac[le] = {Fac::one, Fac::one, Fac::one};
          e_fac[le][u] = Fac(ou);
          e_fac[le][v] = Fac(ov);
          e_pref[le] = 1.0 / g.h(d);
        }
      for (int a = 0; a < 2; ++a) {
        const int lf = 2 * d + a;
        f_comp[lf] = d;
        f_fac[lf] = {Fac::one, Fac::one, Fac::one};
        f_fac[lf][d] = Fac(a);
        f_pref[lf] = g.h(d) / g.cell_volume();
      }
    }
    const double h[3] = {g.hx(), g.hy(), g.hz()};
    auto prod = [&](const std::array<Fac, 3>& a, const std::array<Fac, 3>& b) {
      double p = 1.0;
      for (int ax = 0; ax < 3; ++ax) p *= pair_integral_1d(a[ax], b[ax], h[ax]);
      return p;
    };
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 12; ++c)
        ee[r][c] = e_pref[r] * e_pref[c] * prod(e_fac[r], e_fac[c]);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c)
        ff[r][c] = f_pref[r] * f_pref[c] * prod(f_fac[r], f_fac[c]);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 12; ++c)
        fe[r][c] = f_pref[r] * e_pref[c] * prod(f_fac[r], e_fac[c]);
  }
};

inline std::array<Index, 12> cell_edge_ids(const Complex& cx, int i, int j, int k) {
  std::array<Index, 12> ids{};
  for (int d = 0; d < 3; ++d) {
    auto [u, v] = transverse_axes(d);
    for (int ov = 0; ov < 2; ++ov)
      for (int ou = 0; ou < 2; ++ou) {
        int c[3] = {i, j, k};
        c[u] += ou;
        c[v] += ov;
        ids[size_t(4 * d + 2 * ov + ou)] = cx.edge_id(d, c[0], c[1], c[2]);
      }
  }
  return ids;
}

inline std::array<Index, 6> cell_face_ids(const Complex& cx, int i, int j, int k) {
  std::array<Index, 6> ids{};
  for (int d = 0; d < 3; ++d)
    for (int a = 0; a < 2; ++a) {
      int c[3] = {i, j, k};
      c[d] += a;
      ids[size_t(2 * d + a)] = cx.face_id(d, c[0], c[1], c[2]);
    }
  return ids;
}

// Deterministic single-threaded cell loop; setFromTriplets sums duplicates.
template <class WeightFn>
SpMat assemble_edge_mass(const Complex& cx, WeightFn&& weight) {
  const CellTables tab(cx.spec);
  std::vector<Triplet> trip;
  trip.reserve(size_t(cx.n_cells) * 144);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Sym3 w = weight(cx.cell_id(i, j, k));
        const auto ids = cell_edge_ids(cx, i, j, k);
        for (int r = 0; r < 12; ++r)
          for (int c = 0; c < 12; ++c) {
            const double v = w(tab.e_comp[r], tab.e_comp[c]) * tab.ee[r][c];
            if (v != 0.0) trip.emplace_back(int(ids[r]), int(ids[c]), v);
          }
      }
  SpMat m(int(cx.n_edges), int(cx.n_edges));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

template <class WeightFn>
SpMat assemble_face_mass(const Complex& cx, WeightFn&& weight) {
  const CellTables tab(cx.spec);
  std::vector<Triplet> trip;
  trip.reserve(size_t(cx.n_cells) * 36);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Sym3 w = weight(cx.cell_id(i, j, k));
        const auto ids = cell_face_ids(cx, i, j, k);
        for (int r = 0; r < 6; ++r)
          for (int c = 0; c < 6; ++c) {
            const double v = w(tab.f_comp[r], tab.f_comp[c]) * tab.ff[r][c];
            if (v != 0.0) trip.emplace_back(int(ids[r]), int(ids[c]), v);
          }
      }
  SpMat m(int(cx.n_faces), int(cx.n_faces));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

/// Mixed pairing (W_face, W_edge)_{L2,weighted}: rows faces, cols edges.
template <class WeightFn>
SpMat assemble_face_edge(const Complex& cx, WeightFn&& weight) {
  const CellTables tab(cx.spec);
  std::vector<Triplet> trip;
  trip.reserve(size_t(cx.n_cells) * 72);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Sym3 w = weight(cx.cell_id(i, j, k));
        const auto fids = cell_face_ids(cx, i, j, k);
        const auto eids = cell_edge_ids(cx, i, j, k);
        for (int r = 0; r < 6; ++r)
          for (int c = 0; c < 12; ++c) {
            const double v = w(tab.f_comp[r], tab.e_comp[c]) * tab.fe[r][c];
            if (v != 0.0) trip.emplace_back(int(fids[r]), int(eids[c]), v);
          }
      }
  SpMat m(int(cx.n_faces), int(cx.n_edges));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace detail

/// Every weighted bilinear form of the scheme, assembled with exact cell-wise
/// quadrature for the piecewise-constant coefficients.
struct WeightedForms {
  // Edge (Nedelec) masses.
  SpMat m_edge, m_mu_edge, m_sigma_edge;
  // Face (Raviart-Thomas) masses.
  SpMat m_face, m_mu_face, m_sigma_face, m_invsigma_face;
  // Mixed face x edge pairings (unweighted and sigma^-1-weighted).
  SpMat m_face_edge, m_face_edge_invsigma;
  // curl^T M(face,mu) curl: the weighted curl-curl stiffness on edges.
  SpMat k_curlcurl_mu;
  // curl^T M_face_edge: square edge pairing (curl W_e, W_e'); symmetric on
  // interior edges by the discrete Green identity.
  SpMat k_mix;
  // Interior-node rows of grad^T M_mu_edge: the divergence constraint whose
  // kernel is the discrete X_mu.
  SpMat b_div;
  // Nodal stiffness blocks: mu-weighted on interior nodes (Dirichlet solves),
  // unweighted on all nodes (Neumann solves) and on interior nodes.
  SpMat l_mu_interior, l_node, l_interior;
  // Integral of each nodal hat function (zero-mean deflation weights).
  Vec node_volumes;
  double lambda = 1.0;
};

inline WeightedForms assemble_forms(const Complex& cx, const MaterialModel& model) {
  if (model.mu.size() != cx.n_cells || Index(model.sigma.size()) != cx.n_cells)
    throw ValidationError("assemble_forms: material arrays must match the cell count");

  WeightedForms f;
  f.lambda = model.lambda;
  const auto unit = [](Index) { return Sym3::identity(); };
  const auto mu = [&](Index c) { return Sym3::identity(model.mu[c]); };
  const auto sigma = [&](Index c) { return model.sigma[size_t(c)]; };
  const auto sigma_inv_cells = model.sigma_inverse();
  const auto sigma_inv = [&](Index c) { return sigma_inv_cells[size_t(c)]; };

  f.m_edge = detail::assemble_edge_mass(cx, unit);
  f.m_mu_edge = detail::assemble_edge_mass(cx, mu);
  f.m_sigma_edge = detail::assemble_edge_mass(cx, sigma);
  f.m_face = detail::assemble_face_mass(cx, unit);
  f.m_mu_face = detail::assemble_face_mass(cx, mu);
  f.m_sigma_face = detail::assemble_face_mass(cx, sigma);
  f.m_invsigma_face = detail::assemble_face_mass(cx, sigma_inv);
  f.m_face_edge = detail::assemble_face_edge(cx, unit);
  f.m_face_edge_invsigma = detail::assemble_face_edge(cx, sigma_inv);

  f.k_curlcurl_mu = SpMat(cx.curl.transpose() * f.m_mu_face * cx.curl);
  f.k_mix = SpMat(cx.curl.transpose() * f.m_face_edge);

  const SpMat pn = interior_node_selector(cx);
  const SpMat gt_mmu = SpMat(cx.grad.transpose() * f.m_mu_edge);
  f.b_div = SpMat(pn * gt_mmu);
  f.l_mu_interior = SpMat(pn * (gt_mmu * cx.grad) * pn.transpose());
  f.l_node = SpMat(cx.grad.transpose() * f.m_edge * cx.grad);
  f.l_interior = SpMat(pn * f.l_node * pn.transpose());

  f.node_volumes.resize(cx.n_nodes);
  const auto w1 = [](int idx, int n, double h) { return (idx == 0 || idx == n) ? 0.5 * h : h; };
  for (int k = 0; k <= cx.spec.nz; ++k)
    for (int j = 0; j <= cx.spec.ny; ++j)
      for (int i = 0; i <= cx.spec.nx; ++i)
        f.node_volumes[cx.node_id(i, j, k)] = w1(i, cx.spec.nx, cx.spec.hx()) *
                                              w1(j, cx.spec.ny, cx.spec.hy()) *
                                              w1(k, cx.spec.nz, cx.spec.hz());
  return f;
}

}  // namespace eddycurl
