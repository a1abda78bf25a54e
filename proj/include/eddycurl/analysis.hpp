// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "eddycurl/eigenbasis.hpp"
#include "eddycurl/galerkin.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/sources.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Worst per-step defect of the discrete energy identity along a trajectory.
/// The midpoint scheme satisfies the identity to rounding; the backward Euler
/// scheme has a first-order defect.
struct EnergyIdentityReport {
  double max_abs = 0.0;   ///< largest |defect| over all steps
  double scale = 0.0;     ///< largest energy/power magnitude encountered
  double relative = 0.0;  ///< max_abs / max(scale, tiny)
};

inline EnergyIdentityReport energy_identity_residual(const Trajectory& traj) {
  EnergyIdentityReport rep;
  for (const LedgerRow& row : traj.ledger) {
    rep.max_abs = std::max(rep.max_abs, std::abs(row.residual));
    rep.scale = std::max({rep.scale, std::abs(row.energy0), std::abs(row.energy1),
                          traj.dt * std::abs(row.sigma_ee),
                          traj.dt * std::abs(row.jm_dot_h),
                          traj.dt * std::abs(row.je_dot_e)});
  }
  rep.relative = rep.max_abs / std::max(rep.scale, 1e-300);
  return rep;
}

/// Outcome of checking the a-priori energy bound: peak energy plus total
/// dissipation against the data terms, with the multiplicative constant
/// rebuilt from the material bound and the horizon and printed as a formula.
struct AprioriReport {
  double lhs = 0.0;            ///< sup-energy + dissipation integral
  double rhs = 0.0;            ///< constant * (initial energy + source integrals)
  double constant_used = 0.0;  ///< 2 * Lambda^2 * exp(T)
  std::string formula;         ///< human-readable constant derivation
  double sup_h_sq = 0.0;       ///< peak squared weighted norm of the field
  double dissipation = 0.0;    ///< time integral of (sigma E, E)
  double h0_sq = 0.0;          ///< squared weighted norm of the initial field
  double je_integral = 0.0;    ///< time integral of the electric source energy
  double jm_dual_integral = 0.0;  ///< time integral of the squared dual norm
  bool pass = false;
};

/// Verifies the energy estimate for a computed trajectory.  The magnetic
/// source's dual norm is measured through the modal test space, where the
/// squared dual norm is the (1+lambda)-weighted sum of its coefficients.
inline AprioriReport verify_apriori(const WeightedForms& forms, const EigenBasis& basis,
                                    const Trajectory& traj, const SourceSpec& spec,
                                    double lambda) {
  if (!(lambda >= 1.0))
    throw ValidationError("verify_apriori: the material bound must be >= 1");
  AprioriReport rep;
  const double t_final = traj.times.back();
  rep.constant_used = 2.0 * lambda * lambda * std::exp(t_final);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "2 * Lambda^2 * exp(T) = 2 * %.6g^2 * exp(%.6g) = %.9g",
                lambda, t_final, rep.constant_used);
  rep.formula = buf;

  for (Index k = 0; k < Index(traj.times.size()); ++k)
    rep.sup_h_sq = std::max(rep.sup_h_sq, traj.h.col(k).squaredNorm());
  for (const LedgerRow& row : traj.ledger) rep.dissipation += traj.dt * row.sigma_ee;
  rep.h0_sq = traj.h.col(0).squaredNorm();

  // Trapezoid rule for both source integrals on the step grid.
  std::vector<double> je_sq(traj.times.size()), jm_sq(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const Vec je = spec.je(t);
    je_sq[k] = je.dot(forms.m_edge * je);
    const Vec gamma = basis.psis.transpose() * (forms.m_edge * spec.jm(t));
    double dual = 0.0;
    for (Index j = 0; j < gamma.size(); ++j)
      dual += gamma[j] * gamma[j] / (1.0 + basis.lambdas[j]);
    jm_sq[k] = dual;
  }
  for (size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const double w = 0.5 * (traj.times[k + 1] - traj.times[k]);
    rep.je_integral += w * (je_sq[k] + je_sq[k + 1]);
    rep.jm_dual_integral += w * (jm_sq[k] + jm_sq[k + 1]);
  }

  rep.lhs = rep.sup_h_sq + rep.dissipation;
  rep.rhs = rep.constant_used * (rep.h0_sq + rep.je_integral + rep.jm_dual_integral);
  const double slack = 1e-12 * std::max({rep.lhs, rep.rhs, 1.0});
  rep.pass = rep.lhs <= rep.rhs + slack;
  return rep;
}

/// Dual norm of an edge functional with respect to the graph norm on the
/// constrained space: sqrt(f^T (K + M)^{-1} f) computed with a projected
/// solve.  The functional is first restricted to the constrained space, so
/// weighted-gradient functionals measure zero.  Modal functionals (the
/// weighted mass applied to an eigenfield) give (1 + lambda)^{-1/2}.
inline double dual_norm(const Complex& cx, const WeightedForms& forms, const Vec& f,
                        const CgOptions& options = CgOptions{1e-12}) {
  if (f.size() != cx.n_edges)
    throw ValidationError("dual_norm: functional length does not match the grid");
  const SpMat pe = interior_edge_selector(cx);
  const SpMat k_int = SpMat(pe * forms.k_curlcurl_mu * pe.transpose());
  const SpMat m_int = SpMat(pe * forms.m_mu_edge * pe.transpose());
  const SpMat a_op = SpMat(k_int + m_int);
  detail::ConstraintProjector projector(cx, forms, m_int, 1e-12);

  // Restrict the functional to the constrained subspace: subtract its action
  // on weighted gradients.  This keeps the projected solve consistent.
  Vec f_int = pe * f;
  Vec w = Vec::Zero(projector.b_int.rows());
  {
    CgOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-13 * f_int.norm();
    const Vec rhs = projector.g_int.transpose() * f_int;
    solve_spd(forms.l_mu_interior, rhs, w, projector.precond, opts);
  }
  const Vec f_c = f_int - projector.b_int.transpose() * w;

  CgOptions opts = options;
  opts.abs_tol = std::max(opts.abs_tol, 1e-13 * f_int.norm());
  Vec z = Vec::Zero(f_c.size());
  IncompleteCholeskyPrecond precond(a_op);
  solve_spd(a_op, f_c, z, precond, opts, [&projector](Vec& v) { projector(v); });
  return std::sqrt(std::max(0.0, f_c.dot(z)));
}

/// Strong-form residual of the parabolic equation in modal test directions,
/// for a single state (h, dh/dt) at time t: the weighted rate plus the
/// conductivity-scaled curl-curl term minus both sources, all paired against
/// the modes and normalized by the largest term.  The conductivity enters
/// through its exact cell-wise inverse on fluxes, so this measures the
/// consistency between the mixed recovery and the direct curl-curl form
/// (identical for cell-wise constant isotropic conductivity).
inline double parabolic_residual(const Complex& cx, const WeightedForms& forms,
                                 const EigenBasis& basis, const Vec& h, const Vec& hdot,
                                 double t, const SourceSpec& spec) {
  if (h.size() != basis.psis.cols() || hdot.size() != basis.psis.cols())
    throw ValidationError("parabolic_residual: coefficient count mismatch");
  const Vec field = basis.psis * h;
  const Vec curl_term =
      basis.psis.transpose() *
      Vec(cx.curl.transpose() * (forms.m_invsigma_face * (cx.curl * field)));
  const Vec je_term = basis.psis.transpose() *
                      Vec(cx.curl.transpose() * (forms.m_face_edge_invsigma * spec.je(t)));
  const Vec jm_term = basis.psis.transpose() * (forms.m_edge * spec.jm(t));
  const Vec r = hdot + curl_term - je_term - jm_term;
  const double scale =
      std::max({hdot.norm(), curl_term.norm(), je_term.norm(), jm_term.norm(), 1e-300});
  return r.norm() / scale;
}

/// Trajectory version: worst modal strong-form residual at the scheme's
/// sample points, using the scheme's own difference quotient as the rate.
inline double parabolic_residual(const Complex& cx, const WeightedForms& forms,
                                 const EigenBasis& basis, const Trajectory& traj,
                                 const SourceSpec& spec) {
  const bool midpoint = traj.scheme == Scheme::kImplicitMidpoint;
  double worst = 0.0;
  const Index n_steps = Index(traj.ledger.size());
  const Index stride = std::max<Index>(1, n_steps / 8);
  for (Index k = 0; k < n_steps; k += stride) {
    const Vec prev = traj.h.col(k);
    const Vec next = traj.h.col(k + 1);
    const Vec rate = (next - prev) / traj.dt;
    const Vec h_eval = midpoint ? Vec(0.5 * (prev + next)) : next;
    const double t_eval =
        midpoint ? traj.ledger[size_t(k)].t0 + 0.5 * traj.dt : traj.ledger[size_t(k)].t1;
    worst = std::max(worst, parabolic_residual(cx, forms, basis, h_eval, rate, t_eval, spec));
  }
  return worst;
}

}  // namespace eddycurl
