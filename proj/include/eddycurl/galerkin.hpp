// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eddycurl/eigenbasis.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/helmholtz.hpp"
#include "eddycurl/sources.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// Result of projecting an initial edge field onto the span of the magnetic
/// eigenbasis.  Components outside the constrained space (boundary support,
/// weighted-gradient part) are removed and reported, never silently kept.
struct InitialProjection {
  Vec coeffs;                        ///< modal coefficients
  double input_norm = 0.0;           ///< weighted norm of the admissible input
  double captured_norm = 0.0;        ///< Euclidean norm of the coefficients
  double dropped_gradient_norm = 0.0;  ///< weighted norm of the removed gradient part
  std::vector<std::string> warnings;
};

/// Projects an initial field onto the eigenbasis.  Boundary-supported entries
/// are zeroed (with a warning when they carry weight), the weighted-gradient
/// component is split off and dropped with a warning, and the remaining field
/// is expanded in modal coordinates.  The coefficient norm never exceeds the
/// weighted norm of the admissible part (Bessel).
inline InitialProjection project_initial(const Complex& cx, const WeightedForms& forms,
                                         const EigenBasis& basis, const Vec& h0) {
  if (h0.size() != cx.n_edges)
    throw ValidationError("project_initial: field length does not match the grid");
  InitialProjection out;

  Vec interior = h0;
  double boundary_sq = 0.0;
  for (Index e = 0; e < cx.n_edges; ++e) {
    if (cx.edge_on_boundary[size_t(e)] && interior[e] != 0.0) {
      boundary_sq += interior[e] * interior[e];
      interior[e] = 0.0;
    }
  }
  const double total = std::max(h0.norm(), 1e-300);
  if (std::sqrt(boundary_sq) > 1e-10 * total)
    out.warnings.push_back("project_initial: boundary-supported components discarded");

  const DirichletSplit split = weighted_dirichlet_decompose(cx, forms, interior);
  out.dropped_gradient_norm = split.norm_grad_w;
  out.input_norm = detail::weighted_norm(forms.m_mu_edge, interior);
  if (out.dropped_gradient_norm > 1e-8 * std::max(out.input_norm, 1e-300))
    out.warnings.push_back(
        "project_initial: weighted-gradient component of norm " +
        std::to_string(out.dropped_gradient_norm) + " dropped");

  out.coeffs = expand(forms, basis, split.zeta);
  out.captured_norm = out.coeffs.norm();
  return out;
}

/// The reduced evolution system in modal coordinates: dh/dt = -S h + b(t),
/// with the electric field recovered on the flux space from h and the
/// electric source.
struct ReducedSystem {
  Index n_modes = 0;
  Mat a;        ///< flux-space pairing of mode curls, one column per mode
  Mat s;        ///< reduced operator, symmetric positive semidefinite
  Vec lambdas;  ///< modal eigenvalues (diagonal of s for identity conductivity)
  Mat psis_t;   ///< transposed mode matrix, n_modes x n_edges
  SpMat msigma;               ///< conductivity-weighted flux mass
  std::shared_ptr<Eigen::SimplicialLLT<SpMat>> msigma_llt;
  std::function<Vec(double)> je_face_pair;  ///< electric source paired with fluxes
  std::function<Vec(double)> jm_edge_pair;  ///< magnetic source paired with edges

  /// Solves the conductivity mass against a flux-space right-hand side.
  Vec solve_msigma(const Vec& rhs) const { return msigma_llt->solve(rhs); }

  /// Reduced forcing b(t).
  Vec forcing(double t) const {
    return a.transpose() * solve_msigma(je_face_pair(t)) + psis_t * jm_edge_pair(t);
  }
};

/// Builds the reduced system from the eigenbasis and paired sources.  The
/// conductivity flux mass is factored once; a factorization failure (e.g. a
/// conductivity that vanishes on part of the domain) raises SolverError.
inline ReducedSystem reduce(const Complex& cx, const WeightedForms& forms,
                            const EigenBasis& basis, const HomogenizedSources& sources) {
  if (sources.n_faces != cx.n_faces || sources.n_edges != cx.n_edges)
    throw ValidationError("reduce: sources were paired on a different grid");
  if (sources.h0.size() != cx.n_edges)
    throw ValidationError("reduce: initial field length does not match the grid");
  ReducedSystem sys;
  sys.n_modes = basis.psis.cols();
  sys.a = forms.m_face * (cx.curl * basis.psis);
  sys.lambdas = basis.lambdas;
  sys.psis_t = basis.psis.transpose();
  sys.msigma = forms.m_sigma_face;
  sys.msigma_llt = std::make_shared<Eigen::SimplicialLLT<SpMat>>();
  sys.msigma_llt->compute(sys.msigma);
  if (sys.msigma_llt->info() != Eigen::Success)
    throw SolverError(
        "reduce: conductivity flux mass is not positive definite; "
        "check the conductivity coefficient", {});
  const Mat minv_a = sys.msigma_llt->solve(sys.a);
  sys.s = sys.a.transpose() * minv_a;
  sys.s = 0.5 * (sys.s + sys.s.transpose()).eval();
  sys.je_face_pair = sources.je_face_pair;
  sys.jm_edge_pair = sources.jm_edge_pair;
  return sys;
}

/// Recovers the electric flux field at time t from modal coefficients:
/// solves (sigma-mass) e = A h - paired electric source.
inline Vec recover_E(const ReducedSystem& sys, const Vec& h, double t) {
  if (h.size() != sys.n_modes)
    throw ValidationError("recover_E: coefficient count does not match the system");
  return sys.solve_msigma(Vec(sys.a * h - sys.je_face_pair(t)));
}

enum class Scheme : std::uint8_t {
  kImplicitMidpoint,  ///< second order; preserves the discrete energy identity
  kImplicitEuler,     ///< first order, strongly damping
};

/// Per-step energy accounting.  All quantities are evaluated at the scheme's
/// sample point (midpoint or right endpoint); `residual` is the defect of the
/// discrete energy identity over the step.
struct LedgerRow {
  double t0 = 0.0, t1 = 0.0;
  double energy0 = 0.0;      ///< 1/2 |h|^2 entering the step
  double energy1 = 0.0;      ///< 1/2 |h|^2 leaving the step
  double sigma_ee = 0.0;     ///< conductivity dissipation (sigma E, E)
  double jm_dot_h = 0.0;     ///< magnetic-source power (J~M, H)
  double je_dot_e = 0.0;     ///< electric-source power (J~E, E)
  double dth_sq = 0.0;       ///< squared weighted norm of the discrete rate
  double dth_dual_sq = 0.0;  ///< squared dual norm of the discrete rate
  double residual = 0.0;     ///< energy-identity defect of the step
};

/// A computed modal trajectory with its energy ledger.
struct Trajectory {
  Scheme scheme = Scheme::kImplicitMidpoint;
  double dt = 0.0;
  std::vector<double> times;  ///< step boundaries, first entry 0
  Mat h;                      ///< n_modes x times.size() coefficients
  std::vector<LedgerRow> ledger;
};

/// Integrates the reduced system from the given initial coefficients to
/// t_final with constant step dt (t_final must be an integer multiple).
/// The step matrix is factored once; each step costs one dense solve plus
/// one flux-space solve for the ledger.
inline Trajectory solve_trajectory(const ReducedSystem& sys, const Vec& h0,
                                   double t_final, double dt,
                                   Scheme scheme = Scheme::kImplicitMidpoint) {
  if (h0.size() != sys.n_modes)
    throw ValidationError("solve_trajectory: coefficient count does not match the system");
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw ValidationError("solve_trajectory: step and final time must be positive");
  const auto n_steps = static_cast<Index>(std::llround(t_final / dt));
  if (n_steps < 1 || std::abs(double(n_steps) * dt - t_final) > 1e-9 * t_final)
    throw ValidationError("solve_trajectory: t_final must be an integer number of steps");

  const Index m = sys.n_modes;
  const bool midpoint = scheme == Scheme::kImplicitMidpoint;
  const double w = midpoint ? 0.5 * dt : dt;
  const Mat lhs = Mat::Identity(m, m) + w * sys.s;
  const Eigen::LLT<Mat> llt(lhs);
  if (llt.info() != Eigen::Success)
    throw SolverError("solve_trajectory: step matrix factorization failed", {});
  const Mat rhs_mat = midpoint ? Mat(Mat::Identity(m, m) - 0.5 * dt * sys.s) : Mat();

  Trajectory traj;
  traj.scheme = scheme;
  traj.dt = dt;
  traj.times.resize(size_t(n_steps) + 1);
  traj.h.resize(m, n_steps + 1);
  traj.h.col(0) = h0;
  traj.ledger.resize(size_t(n_steps));

  for (Index k = 0; k < n_steps; ++k) {
    const double t0 = double(k) * dt;
    const double t1 = double(k + 1) * dt;
    traj.times[size_t(k)] = t0;
    const Vec prev = traj.h.col(k);
    Vec next;
    double t_eval;
    if (midpoint) {
      t_eval = t0 + 0.5 * dt;
      next = llt.solve(Vec(rhs_mat * prev + dt * sys.forcing(t_eval)));
    } else {
      t_eval = t1;
      next = llt.solve(Vec(prev + dt * sys.forcing(t_eval)));
    }
    traj.h.col(k + 1) = next;

    LedgerRow& row = traj.ledger[size_t(k)];
    row.t0 = t0;
    row.t1 = t1;
    row.energy0 = 0.5 * prev.squaredNorm();
    row.energy1 = 0.5 * next.squaredNorm();
    const Vec h_eval = midpoint ? Vec(0.5 * (prev + next)) : next;
    const Vec e_eval = recover_E(sys, h_eval, t_eval);
    row.sigma_ee = e_eval.dot(sys.msigma * e_eval);
    row.jm_dot_h = (sys.psis_t * sys.jm_edge_pair(t_eval)).dot(h_eval);
    row.je_dot_e = e_eval.dot(sys.je_face_pair(t_eval));
    const Vec rate = (next - prev) / dt;
    row.dth_sq = rate.squaredNorm();
    double dual = 0.0;
    for (Index j = 0; j < m; ++j) dual += rate[j] * rate[j] / (1.0 + sys.lambdas[j]);
    row.dth_dual_sq = dual;
    row.residual = row.energy1 - row.energy0 -
                   dt * (row.jm_dot_h - row.sigma_ee - row.je_dot_e);
  }
  traj.times.back() = double(n_steps) * dt;
  return traj;
}

/// Normalized residuals of the two weak balance laws along a trajectory.
struct WeakResiduals {
  double ampere = 0.0;   ///< flux-space balance curl H - sigma E = J~E
  double faraday = 0.0;  ///< edge-space balance mu dH/dt + curl E = J~M
};

/// Evaluates both weak residuals at the scheme's sample points.  The flux
/// balance is measured in the norm of the full flux space; the edge balance
/// is measured against every eigenmode and against seeded random interior
/// gradient test fields (whose curl pairing vanishes identically).
inline WeakResiduals weak_residual(const Complex& cx, const WeightedForms& forms,
                                   const EigenBasis& basis, const ReducedSystem& sys,
                                   const Trajectory& traj, int n_gradient_tests = 8,
                                   unsigned seed = 42) {
  WeakResiduals out;
  const Index n_steps = Index(traj.ledger.size());
  const Index stride = std::max<Index>(1, n_steps / 8);
  const bool midpoint = traj.scheme == Scheme::kImplicitMidpoint;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const SpMat pn = interior_node_selector(cx);
  std::vector<Vec> grad_tests;
  grad_tests.reserve(size_t(n_gradient_tests));
  for (int i = 0; i < n_gradient_tests; ++i) {
    Vec q(pn.rows());
    for (Index j = 0; j < q.size(); ++j) q[j] = unif(rng);
    grad_tests.push_back(Vec(cx.grad * (pn.transpose() * q)));
  }

  for (Index k = 0; k < n_steps; k += stride) {
    const LedgerRow& row = traj.ledger[size_t(k)];
    const double t_eval = midpoint ? 0.5 * (row.t0 + row.t1) : row.t1;
    const Vec prev = traj.h.col(k);
    const Vec next = traj.h.col(k + 1);
    const Vec h_eval = midpoint ? Vec(0.5 * (prev + next)) : next;
    const Vec rate = (next - prev) / traj.dt;
    const Vec e_eval = recover_E(sys, h_eval, t_eval);

    const Vec ah = sys.a * h_eval;
    const Vec se = sys.msigma * e_eval;
    const Vec je = sys.je_face_pair(t_eval);
    const double scale_a = std::max({ah.norm(), se.norm(), je.norm(), 1e-300});
    out.ampere = std::max(out.ampere, (ah - se - je).norm() / scale_a);

    const Vec sh = sys.s * h_eval;
    const Vec b = sys.forcing(t_eval);
    const double scale_f = std::max({rate.norm(), sh.norm(), b.norm(), 1e-300});
    out.faraday = std::max(out.faraday, (rate + sh - b).norm() / scale_f);

    // Gradient tests: the curl pairing vanishes since curl o grad = 0, so the
    // balance reduces to the weighted rate against the magnetic source.
    const Vec jm = sys.jm_edge_pair(t_eval);
    const Vec rate_field = sys.psis_t.transpose() * rate;
    const Vec mu_rate = forms.m_mu_edge * rate_field;
    const double scale_g = std::max({mu_rate.norm(), jm.norm(), 1e-300});
    for (const Vec& g : grad_tests) {
      const double val = g.dot(mu_rate) - g.dot(jm);
      out.faraday = std::max(out.faraday, std::abs(val) / (g.norm() * scale_g));
    }
  }
  return out;
}

}  // namespace eddycurl
