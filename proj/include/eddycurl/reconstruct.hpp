// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "eddycurl/assembly.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Cell-center vector samples of an edge cochain: per component, the mean of
/// the four parallel edge circulations divided by the edge length.
inline Mat edge_to_cells(const Complex& cx, const Vec& h) {
  Mat out = Mat::Zero(cx.n_cells, 3);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Index c = cx.cell_id(i, j, k);
        for (int d = 0; d < 3; ++d) {
          auto [u, v] = detail::transverse_axes(d);
          double acc = 0.0;
          for (int ov = 0; ov < 2; ++ov)
            for (int ou = 0; ou < 2; ++ou) {
              int t[3] = {i, j, k};
              t[u] += ou;
              t[v] += ov;
              acc += h[cx.edge_id(d, t[0], t[1], t[2])];
            }
          out(c, d) = acc / (4.0 * cx.spec.h(d));
        }
      }
  return out;
}

/// Cell-center vector samples of a face cochain: mean of the two opposite
/// fluxes divided by the face area.
inline Mat face_to_cells(const Complex& cx, const Vec& f) {
  Mat out = Mat::Zero(cx.n_cells, 3);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Index c = cx.cell_id(i, j, k);
        for (int d = 0; d < 3; ++d) {
          double acc = 0.0;
          for (int a = 0; a < 2; ++a) {
            int t[3] = {i, j, k};
            t[d] += a;
            acc += f[cx.face_id(d, t[0], t[1], t[2])];
          }
          out(c, d) = acc / (2.0 * cx.face_area(d));
        }
      }
  return out;
}

/// Nodal vector samples of an edge cochain: per component, the mean over the
/// one or two incident parallel edges.
inline Mat edge_to_nodes(const Complex& cx, const Vec& h) {
  Mat out = Mat::Zero(cx.n_nodes, 3);
  const int n[3] = {cx.spec.nx, cx.spec.ny, cx.spec.nz};
  for (int k = 0; k <= n[2]; ++k)
    for (int j = 0; j <= n[1]; ++j)
      for (int i = 0; i <= n[0]; ++i) {
        const Index v = cx.node_id(i, j, k);
        const int idx[3] = {i, j, k};
        for (int d = 0; d < 3; ++d) {
          double acc = 0.0;
          int cnt = 0;
          if (idx[d] > 0) {
            int t[3] = {i, j, k};
            t[d] -= 1;
            acc += h[cx.edge_id(d, t[0], t[1], t[2])];
            ++cnt;
          }
          if (idx[d] < n[d]) {
            acc += h[cx.edge_id(d, i, j, k)];
            ++cnt;
          }
          out(v, d) = acc / (cnt * cx.spec.h(d));
        }
      }
  return out;
}

/// Cell-centered gradient tensor of a nodal vector field: grad(c, 3*a + d)
/// approximates d_a psi_d as the mean difference quotient over the cell's
/// four a-edges.
inline Mat nodal_gradient_at_cells(const Complex& cx, const Mat& nodal) {
  Mat out = Mat::Zero(cx.n_cells, 9);
  for (int k = 0; k < cx.spec.nz; ++k)
    for (int j = 0; j < cx.spec.ny; ++j)
      for (int i = 0; i < cx.spec.nx; ++i) {
        const Index c = cx.cell_id(i, j, k);
        for (int a = 0; a < 3; ++a) {
          auto [u, v] = detail::transverse_axes(a);
          const int da = a == 0, db = a == 1, dc = a == 2;
          for (int d = 0; d < 3; ++d) {
            double acc = 0.0;
            for (int ov = 0; ov < 2; ++ov)
              for (int ou = 0; ou < 2; ++ou) {
                int t[3] = {i, j, k};
                t[u] += ou;
                t[v] += ov;
                const Index tail = cx.node_id(t[0], t[1], t[2]);
                const Index head = cx.node_id(t[0] + da, t[1] + db, t[2] + dc);
                acc += nodal(head, d) - nodal(tail, d);
              }
            out(c, 3 * a + d) = acc / (4.0 * cx.spec.h(a));
          }
        }
      }
  return out;
}

}  // namespace eddycurl
