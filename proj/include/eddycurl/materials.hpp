// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eddycurl/grid.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Symmetric 3x3 tensor stored by its six independent components.
struct Sym3 {
  double xx = 1.0, yy = 1.0, zz = 1.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  static Sym3 identity(double s = 1.0) { return {s, s, s, 0.0, 0.0, 0.0}; }
  static Sym3 diagonal(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }

  double operator()(int r, int c) const {
    if (r == c) return r == 0 ? xx : (r == 1 ? yy : zz);
    const int lo = std::min(r, c), hi = std::max(r, c);
    if (lo == 0) return hi == 1 ? xy : xz;
    return yz;
  }

  Eigen::Matrix3d dense() const {
    Eigen::Matrix3d m;
    m << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return m;
  }

  std::array<double, 3> apply(const std::array<double, 3>& v) const {
    return {xx * v[0] + xy * v[1] + xz * v[2], xy * v[0] + yy * v[1] + yz * v[2],
            xz * v[0] + yz * v[1] + zz * v[2]};
  }

  /// Smallest/largest eigenvalue.
  std::pair<double, double> eig_range() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(dense(), Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(2)};
  }
};

/// Explicit symmetric inverse via the adjugate; rejects near-singular input.
inline Sym3 invert_sym3(const Sym3& s, double pivot_tol = 1e-12) {
  const double a = s.xx, b = s.yy, c = s.zz, d = s.xy, e = s.xz, f = s.yz;
  const double co_xx = b * c - f * f;
  const double co_xy = e * f - d * c;
  const double co_xz = d * f - e * b;
  const double co_yy = a * c - e * e;
  const double co_yz = d * e - a * f;
  const double co_zz = a * b - d * d;
  const double det = a * co_xx + d * co_xy + e * co_xz;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d),
                                 std::abs(e), std::abs(f), 1e-300});
  if (std::abs(det) <= pivot_tol * scale * scale * scale)
    throw ValidationError("materials: conductivity tensor is numerically singular");
  const double inv = 1.0 / det;
  Sym3 r;
  r.xx = co_xx * inv;
  r.yy = co_yy * inv;
  r.zz = co_zz * inv;
  r.xy = co_xy * inv;
  r.xz = co_xz * inv;
  r.yz = co_yz * inv;
  return r;
}

/// Cell-wise coefficients: scalar permeability mu, symmetric conductivity
/// sigma, and the structure constant Lambda that is supposed to dominate both
/// (Lambda^-1 <= mu <= Lambda, sigma's spectrum within [Lambda^-1, Lambda]).
struct MaterialModel {
  Vec mu;                   // one value per cell
  std::vector<Sym3> sigma;  // one tensor per cell
  double lambda = 1.0;

  static MaterialModel constant(const Complex& cx, double mu_value, const Sym3& sigma_value,
                                double lambda) {
    MaterialModel m;
    m.mu = Vec::Constant(cx.n_cells, mu_value);
    m.sigma.assign(size_t(cx.n_cells), sigma_value);
    m.lambda = lambda;
    return m;
  }

  std::vector<Sym3> sigma_inverse(double pivot_tol = 1e-12) const {
    std::vector<Sym3> inv;
    inv.reserve(sigma.size());
    for (const auto& s : sigma) inv.push_back(invert_sym3(s, pivot_tol));
    return inv;
  }
};

struct MaterialReport {
  bool feasible = false;
  double mu_min = 0.0, mu_max = 0.0;
  double sigma_eig_min = 0.0, sigma_eig_max = 0.0;
  double mu_lipschitz_estimate = 0.0;  // max adjacent-cell difference quotient
  std::vector<std::string> warnings;
};

/// Checks the structure bounds against the model's Lambda.  Violations of the
/// pointwise bounds reject; the Lipschitz estimate for mu only warns, since a
/// cell-sampled field cannot certify a gradient bound.
inline MaterialReport validate(const Complex& cx, const MaterialModel& model) {
  if (model.mu.size() != cx.n_cells || Index(model.sigma.size()) != cx.n_cells)
    throw ValidationError("materials: coefficient arrays must have one entry per cell");
  if (!(model.lambda >= 1.0))
    throw ValidationError("materials: Lambda must be >= 1");

  MaterialReport rep;
  rep.mu_min = model.mu.minCoeff();
  rep.mu_max = model.mu.maxCoeff();
  rep.sigma_eig_min = std::numeric_limits<double>::infinity();
  rep.sigma_eig_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : model.sigma) {
    auto [lo, hi] = s.eig_range();
    rep.sigma_eig_min = std::min(rep.sigma_eig_min, lo);
    rep.sigma_eig_max = std::max(rep.sigma_eig_max, hi);
  }

  const double inv_lambda = 1.0 / model.lambda;
  const double slack = 1e-12 * model.lambda;
  if (rep.mu_min < inv_lambda - slack || rep.mu_max > model.lambda + slack)
    throw ValidationError("materials: mu violates Lambda^-1 <= mu <= Lambda");
  if (rep.sigma_eig_min < inv_lambda - slack || rep.sigma_eig_max > model.lambda + slack)
    throw ValidationError("materials: sigma spectrum violates [Lambda^-1, Lambda]");

  // Difference-quotient estimate of |grad mu| across shared faces.
  const int nx = cx.spec.nx, ny = cx.spec.ny, nz = cx.spec.nz;
  double lip = 0.0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double m0 = model.mu[cx.cell_id(i, j, k)];
        if (i + 1 < nx)
          lip = std::max(lip, std::abs(model.mu[cx.cell_id(i + 1, j, k)] - m0) / cx.spec.hx());
        if (j + 1 < ny)
          lip = std::max(lip, std::abs(model.mu[cx.cell_id(i, j + 1, k)] - m0) / cx.spec.hy());
        if (k + 1 < nz)
          lip = std::max(lip, std::abs(model.mu[cx.cell_id(i, j, k + 1)] - m0) / cx.spec.hz());
      }
  rep.mu_lipschitz_estimate = lip;
  if (lip > model.lambda)
    rep.warnings.push_back(
        "mu difference quotient " + std::to_string(lip) +
        " exceeds Lambda; the gradient bound cannot be certified from cell samples");

  rep.feasible = true;
  return rep;
}

/// Smallest Lambda >= 1 for which validate() would accept the pointwise bounds.
inline double minimal_feasible_lambda(const MaterialModel& model) {
  double need = 1.0;
  need = std::max(need, model.mu.maxCoeff());
  need = std::max(need, 1.0 / model.mu.minCoeff());
  for (const auto& s : model.sigma) {
    auto [lo, hi] = s.eig_range();
    need = std::max({need, hi, 1.0 / lo});
  }
  return need;
}

/// Two horizontal layers split at z = interface_z (cells classified by their
/// center); bottom layer takes the first coefficient pair.
inline MaterialModel two_layer(const Complex& cx, double mu_bottom, double mu_top,
                               const Sym3& sigma_bottom, const Sym3& sigma_top,
                               double interface_z, double lambda) {
  MaterialModel m;
  m.mu.resize(cx.n_cells);
  m.sigma.resize(size_t(cx.n_cells));
  m.lambda = lambda;
  for (Index c = 0; c < cx.n_cells; ++c) {
    const bool top = cx.cell_center(c)[2] > interface_z;
    m.mu[c] = top ? mu_top : mu_bottom;
    m.sigma[size_t(c)] = top ? sigma_top : sigma_bottom;
  }
  return m;
}

}  // namespace eddycurl
