// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eddycurl/types.hpp"

namespace eddycurl {

/// Axis-aligned box, uniformly divided into nx*ny*nz cells.
struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double lx = 1.0, ly = 1.0, lz = 1.0;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double hz() const { return lz / nz; }
  double h(int axis) const { return axis == 0 ? hx() : (axis == 1 ? hy() : hz()); }
  int n(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  double extent(int axis) const { return axis == 0 ? lx : (axis == 1 ? ly : lz); }
  double volume() const { return lx * ly * lz; }
  double cell_volume() const { return hx() * hy() * hz(); }
};

/// Staggered mesh complex: nodes, axis-aligned edges, faces and cells with the
/// integer incidence matrices grad (node->edge), curl (edge->face) and
/// div (face->cell).  Edges point along +axis; faces are oriented by +normal.
/// All id spaces are x-fastest lexicographic, with the x/y/z family blocks
/// stored in that order.
class Complex {
 public:
  GridSpec spec;

  Index n_nodes = 0, n_edges = 0, n_faces = 0, n_cells = 0;

  SpMat grad;  // n_edges x n_nodes, entries -1/+1
  SpMat curl;  // n_faces x n_edges, entries -1/+1
  SpMat div;   // n_cells x n_faces, entries -1/+1

  std::vector<std::uint8_t> node_on_boundary;  // node lies on the box surface
  std::vector<std::uint8_t> edge_on_boundary;  // whole edge contained in the surface
  std::vector<std::uint8_t> face_on_boundary;  // face contained in the surface

  std::vector<Index> interior_nodes;
  std::vector<Index> interior_edges;

  // ---- id maps -------------------------------------------------------------

  Index node_id(int i, int j, int k) const {
    return i + Index(spec.nx + 1) * (j + Index(spec.ny + 1) * k);
  }

  /// Inverse of node_id.
  struct NodeCoords {
    int i, j, k;
  };
  NodeCoords node_coords(Index v) const {
    const int sx = spec.nx + 1, sy = spec.ny + 1;
    const int i = int(v % sx);
    const int j = int((v / sx) % sy);
    const int k = int(v / (Index(sx) * sy));
    return {i, j, k};
  }

  /// Edge of direction `axis` whose tail node is (i,j,k).
  Index edge_id(int axis, int i, int j, int k) const {
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    switch (axis) {
      case 0:
        return i + Index(nx) * (j + Index(ny + 1) * k);
      case 1:
        return Index(nx) * (ny + 1) * (nz + 1) + i + Index(nx + 1) * (j + Index(ny) * k);
      default:
        return Index(nx) * (ny + 1) * (nz + 1) + Index(nx + 1) * ny * (nz + 1) + i +
               Index(nx + 1) * (j + Index(ny + 1) * k);
    }
  }

  /// Face with normal `axis`, lower corner node (i,j,k).
  Index face_id(int axis, int i, int j, int k) const {
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    switch (axis) {
      case 0:
        return i + Index(nx + 1) * (j + Index(ny) * k);
      case 1:
        return Index(nx + 1) * ny * nz + i + Index(nx) * (j + Index(ny + 1) * k);
      default:
        return Index(nx + 1) * ny * nz + Index(nx) * (ny + 1) * nz + i +
               Index(nx) * (j + Index(ny) * k);
    }
  }

  Index cell_id(int i, int j, int k) const {
    return i + Index(spec.nx) * (j + Index(spec.ny) * k);
  }

  Index edge_count(int axis) const {
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    switch (axis) {
      case 0: return Index(nx) * (ny + 1) * (nz + 1);
      case 1: return Index(nx + 1) * ny * (nz + 1);
      default: return Index(nx + 1) * (ny + 1) * nz;
    }
  }

  Index face_count(int axis) const {
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    switch (axis) {
      case 0: return Index(nx + 1) * ny * nz;
      case 1: return Index(nx) * (ny + 1) * nz;
      default: return Index(nx) * ny * (nz + 1);
    }
  }

  int edge_axis(Index e) const {
    if (e < edge_count(0)) return 0;
    return e < edge_count(0) + edge_count(1) ? 1 : 2;
  }

  int face_axis(Index f) const {
    if (f < face_count(0)) return 0;
    return f < face_count(0) + face_count(1) ? 1 : 2;
  }

  /// Inverse of edge_id: (axis, i, j, k) of the edge's tail node.
  std::array<int, 4> edge_coords(Index e) const {
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    (void)nz;
    const int axis = edge_axis(e);
    Index r = e;
    if (axis >= 1) r -= edge_count(0);
    if (axis == 2) r -= edge_count(1);
    int sx = axis == 0 ? nx : nx + 1;
    int sy = axis == 1 ? ny : ny + 1;
    const int i = int(r % sx);
    const int j = int((r / sx) % sy);
    const int k = int(r / (Index(sx) * sy));
    return {axis, i, j, k};
  }

  std::array<int, 4> face_coords(Index f) const {
    const int nx = spec.nx, ny = spec.ny;
    const int axis = face_axis(f);
    Index r = f;
    if (axis >= 1) r -= face_count(0);
    if (axis == 2) r -= face_count(1);
    int sx = axis == 0 ? nx + 1 : nx;
    int sy = axis == 1 ? ny + 1 : ny;
    const int i = int(r % sx);
    const int j = int((r / sx) % sy);
    const int k = int(r / (Index(sx) * sy));
    return {axis, i, j, k};
  }

  std::array<int, 3> cell_coords(Index c) const {
    const int nx = spec.nx, ny = spec.ny;
    return {int(c % nx), int((c / nx) % ny), int(c / (Index(nx) * ny))};
  }

  // ---- geometry ------------------------------------------------------------

  std::array<double, 3> node_pos(int i, int j, int k) const {
    return {i * spec.hx(), j * spec.hy(), k * spec.hz()};
  }

  std::array<double, 3> node_pos(Index v) const {
    const auto [i, j, k] = node_coords(v);
    return node_pos(i, j, k);
  }

  std::array<double, 3> edge_center(Index e) const {
    auto [axis, i, j, k] = edge_coords(e);
    auto p = node_pos(i, j, k);
    p[axis] += 0.5 * spec.h(axis);
    return p;
  }

  std::array<double, 3> face_center(Index f) const {
    auto [axis, i, j, k] = face_coords(f);
    auto p = node_pos(i, j, k);
    for (int d = 0; d < 3; ++d)
      if (d != axis) p[d] += 0.5 * spec.h(d);
    return p;
  }

  std::array<double, 3> cell_center(Index c) const {
    auto [i, j, k] = cell_coords(c);
    return {(i + 0.5) * spec.hx(), (j + 0.5) * spec.hy(), (k + 0.5) * spec.hz()};
  }

  double face_area(int axis) const {
    switch (axis) {
      case 0: return spec.hy() * spec.hz();
      case 1: return spec.hx() * spec.hz();
      default: return spec.hx() * spec.hy();
    }
  }
};

/// Builds the full complex for a grid.  The incidence matrices satisfy
/// curl*grad = 0 and div*curl = 0 exactly (integer cancellation).
inline Complex build_complex(const GridSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1)
    throw ValidationError("grid: cell counts must be >= 1");
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0) || !(spec.lz > 0.0))
    throw ValidationError("grid: box extents must be positive");

  Complex cx;
  cx.spec = spec;
  const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
  cx.n_nodes = Index(nx + 1) * (ny + 1) * (nz + 1);
  cx.n_edges = cx.edge_count(0) + cx.edge_count(1) + cx.edge_count(2);
  cx.n_faces = cx.face_count(0) + cx.face_count(1) + cx.face_count(2);
  cx.n_cells = Index(nx) * ny * nz;

  // grad: row per edge, -1 at tail, +1 at head.
  {
    std::vector<Triplet> t;
    t.reserve(2 * size_t(cx.n_edges));
    for (int axis = 0; axis < 3; ++axis) {
      const int di = axis == 0, dj = axis == 1, dk = axis == 2;
      const int ei = axis == 0 ? nx : nx + 1;
      const int ej = axis == 1 ? ny : ny + 1;
      const int ek = axis == 2 ? nz : nz + 1;
      for (int k = 0; k < ek; ++k)
        for (int j = 0; j < ej; ++j)
          for (int i = 0; i < ei; ++i) {
            const Index e = cx.edge_id(axis, i, j, k);
            t.emplace_back(int(e), int(cx.node_id(i, j, k)), -1.0);
            t.emplace_back(int(e), int(cx.node_id(i + di, j + dj, k + dk)), 1.0);
          }
    }
    cx.grad.resize(int(cx.n_edges), int(cx.n_nodes));
    cx.grad.setFromTriplets(t.begin(), t.end());
  }

  // curl: row per face, signed circulation of its four boundary edges,
  // right-hand rule about the +normal.
  {
    std::vector<Triplet> t;
    t.reserve(4 * size_t(cx.n_faces));
    for (int k = 0; k < nz; ++k)  // x-faces
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          const int f = int(cx.face_id(0, i, j, k));
          t.emplace_back(f, int(cx.edge_id(1, i, j, k)), 1.0);
          t.emplace_back(f, int(cx.edge_id(2, i, j + 1, k)), 1.0);
          t.emplace_back(f, int(cx.edge_id(1, i, j, k + 1)), -1.0);
          t.emplace_back(f, int(cx.edge_id(2, i, j, k)), -1.0);
        }
    for (int k = 0; k < nz; ++k)  // y-faces
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const int f = int(cx.face_id(1, i, j, k));
          t.emplace_back(f, int(cx.edge_id(2, i, j, k)), 1.0);
          t.emplace_back(f, int(cx.edge_id(0, i, j, k + 1)), 1.0);
          t.emplace_back(f, int(cx.edge_id(2, i + 1, j, k)), -1.0);
          t.emplace_back(f, int(cx.edge_id(0, i, j, k)), -1.0);
        }
    for (int k = 0; k <= nz; ++k)  // z-faces
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const int f = int(cx.face_id(2, i, j, k));
          t.emplace_back(f, int(cx.edge_id(0, i, j, k)), 1.0);
          t.emplace_back(f, int(cx.edge_id(1, i + 1, j, k)), 1.0);
          t.emplace_back(f, int(cx.edge_id(0, i, j + 1, k)), -1.0);
          t.emplace_back(f, int(cx.edge_id(1, i, j, k)), -1.0);
        }
    cx.curl.resize(int(cx.n_faces), int(cx.n_edges));
    cx.curl.setFromTriplets(t.begin(), t.end());
  }

  // div: row per cell, outflux minus influx per axis.
  {
    std::vector<Triplet> t;
    t.reserve(6 * size_t(cx.n_cells));
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const int c = int(cx.cell_id(i, j, k));
          t.emplace_back(c, int(cx.face_id(0, i + 1, j, k)), 1.0);
          t.emplace_back(c, int(cx.face_id(0, i, j, k)), -1.0);
          t.emplace_back(c, int(cx.face_id(1, i, j + 1, k)), 1.0);
          t.emplace_back(c, int(cx.face_id(1, i, j, k)), -1.0);
          t.emplace_back(c, int(cx.face_id(2, i, j, k + 1)), 1.0);
          t.emplace_back(c, int(cx.face_id(2, i, j, k)), -1.0);
        }
    cx.div.resize(int(cx.n_cells), int(cx.n_faces));
    cx.div.setFromTriplets(t.begin(), t.end());
  }

  // Boundary classification.
  cx.node_on_boundary.assign(size_t(cx.n_nodes), 0);
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (i == 0 || i == nx || j == 0 || j == ny || k == 0 || k == nz)
          cx.node_on_boundary[size_t(cx.node_id(i, j, k))] = 1;

  cx.edge_on_boundary.assign(size_t(cx.n_edges), 0);
  for (Index e = 0; e < cx.n_edges; ++e) {
    auto [axis, i, j, k] = cx.edge_coords(e);
    bool b = false;
    if (axis != 0) b = b || i == 0 || i == nx;
    if (axis != 1) b = b || j == 0 || j == ny;
    if (axis != 2) b = b || k == 0 || k == nz;
    cx.edge_on_boundary[size_t(e)] = b ? 1 : 0;
  }

  cx.face_on_boundary.assign(size_t(cx.n_faces), 0);
  for (Index f = 0; f < cx.n_faces; ++f) {
    auto [axis, i, j, k] = cx.face_coords(f);
    const int pos = axis == 0 ? i : (axis == 1 ? j : k);
    cx.face_on_boundary[size_t(f)] = (pos == 0 || pos == spec.n(axis)) ? 1 : 0;
  }

  for (Index v = 0; v < cx.n_nodes; ++v)
    if (!cx.node_on_boundary[size_t(v)]) cx.interior_nodes.push_back(v);
  for (Index e = 0; e < cx.n_edges; ++e)
    if (!cx.edge_on_boundary[size_t(e)]) cx.interior_edges.push_back(e);

  return cx;
}

/// Zeroes every boundary-edge entry of an edge field (the tangential-trace
/// condition psi x n = 0); idempotent.
inline Vec restrict_interior(const Complex& cx, const Vec& edge_field) {
  if (edge_field.size() != cx.n_edges)
    throw ValidationError("restrict_interior: field length != edge count");
  Vec out = edge_field;
  for (Index e = 0; e < cx.n_edges; ++e)
    if (cx.edge_on_boundary[size_t(e)]) out[e] = 0.0;
  return out;
}

/// Selector P (n_interior_edges x n_edges) with P*field = interior entries.
inline SpMat interior_edge_selector(const Complex& cx) {
  std::vector<Triplet> t;
  t.reserve(cx.interior_edges.size());
  for (size_t r = 0; r < cx.interior_edges.size(); ++r)
    t.emplace_back(int(r), int(cx.interior_edges[r]), 1.0);
  SpMat p(int(cx.interior_edges.size()), int(cx.n_edges));
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

/// Selector (n_interior_nodes x n_nodes) for homogeneous Dirichlet test spaces.
inline SpMat interior_node_selector(const Complex& cx) {
  std::vector<Triplet> t;
  t.reserve(cx.interior_nodes.size());
  for (size_t r = 0; r < cx.interior_nodes.size(); ++r)
    t.emplace_back(int(r), int(cx.interior_nodes[r]), 1.0);
  SpMat p(int(cx.interior_nodes.size()), int(cx.n_nodes));
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

}  // namespace eddycurl
