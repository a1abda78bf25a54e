// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "eddycurl/galerkin.hpp"
#include "support/oracles.hpp"

using namespace eddycurl;

namespace {

struct Setup {
  Complex cx;
  MaterialModel model;
  WeightedForms forms;
};

Setup make_setup(int n, double mu_top = 1.0, const Sym3& sigma = Sym3::identity(),
                 double lambda = 1.0) {
  Setup s;
  s.cx = build_complex({n, n, n, 1.0, 1.0, 1.0});
  if (mu_top == 1.0)
    s.model = MaterialModel::constant(s.cx, 1.0, sigma, lambda);
  else
    s.model = two_layer(s.cx, 1.0, mu_top, sigma, sigma, 0.5, lambda);
  s.forms = assemble_forms(s.cx, s.model);
  return s;
}

SourceSpec zero_sources(const Complex& cx) {
  SourceSpec spec;
  spec.je = TimeSeries::zero(cx.n_edges);
  spec.jm = TimeSeries::zero(cx.n_edges);
  spec.h0 = Vec::Zero(cx.n_edges);
  return spec;
}

// Scalar implicit-midpoint recurrence for dh/dt = -rate h.
double midpoint_power(double rate, double dt, Index k) {
  const double z = rate * dt;
  return std::pow((1.0 - 0.5 * z) / (1.0 + 0.5 * z), double(k));
}

}  // namespace

TEST_CASE("reduced operator is the spectrum scaled by the conductivity", "[galerkin]") {
  Setup s = make_setup(4, 1.0, Sym3::identity(0.5));
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 1);
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, zero_sources(s.cx)));
  REQUIRE(sys.s.rows() == 1);
  const double expected = basis.lambdas[0] / 0.5;
  CHECK(std::abs(sys.s(0, 0) - expected) <= 1e-7 * expected);

  Setup u = make_setup(4);
  EigenBasis basis2 = magnetic_eigenbasis(u.cx, u.forms, 2);
  ReducedSystem sys2 =
      reduce(u.cx, u.forms, basis2, homogenize(u.cx, u.forms, zero_sources(u.cx)));
  const double scale = basis2.lambdas[1];
  CHECK(std::abs(sys2.s(0, 0) - basis2.lambdas[0]) <= 1e-8 * scale);
  CHECK(std::abs(sys2.s(1, 1) - basis2.lambdas[1]) <= 1e-8 * scale);
  CHECK(std::abs(sys2.s(0, 1)) <= 1e-8 * scale);
  CHECK(std::abs(sys2.s(1, 0)) <= 1e-8 * scale);
}

TEST_CASE("zero data yields the exactly zero trajectory and field", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 4);
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, zero_sources(s.cx)));
  for (Scheme scheme : {Scheme::kImplicitMidpoint, Scheme::kImplicitEuler}) {
    Trajectory traj = solve_trajectory(sys, Vec::Zero(4), 0.5, 0.05, scheme);
    REQUIRE(traj.times.size() == 11);
    double worst = 0.0;
    for (size_t k = 0; k < traj.times.size(); ++k) {
      worst = std::max(worst, traj.h.col(Index(k)).lpNorm<Eigen::Infinity>());
      const Vec e = recover_E(sys, traj.h.col(Index(k)), traj.times[k]);
      worst = std::max(worst, e.lpNorm<Eigen::Infinity>());
    }
    CHECK(worst == 0.0);
    for (const LedgerRow& row : traj.ledger) {
      CHECK(row.energy1 == 0.0);
      CHECK(row.sigma_ee == 0.0);
      CHECK(row.residual == 0.0);
    }
  }
}

TEST_CASE("single decaying mode converges at the scheme order", "[galerkin]") {
  Setup s = make_setup(4, 1.0, Sym3::identity(2.0));
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 1);
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, zero_sources(s.cx)));
  const double rate = sys.s(0, 0);
  const double t_final = 0.4;
  Vec h0 = Vec::Ones(1);

  auto max_error = [&](double dt, Scheme scheme) {
    Trajectory traj = solve_trajectory(sys, h0, t_final, dt, scheme);
    double err = 0.0;
    for (size_t k = 0; k < traj.times.size(); ++k)
      err = std::max(err, std::abs(traj.h(0, Index(k)) - std::exp(-rate * traj.times[k])));
    return err;
  };

  const double m1 = max_error(0.04, Scheme::kImplicitMidpoint);
  const double m2 = max_error(0.02, Scheme::kImplicitMidpoint);
  const double m3 = max_error(0.01, Scheme::kImplicitMidpoint);
  CHECK(std::log2(m1 / m2) >= 1.9);
  CHECK(std::log2(m2 / m3) >= 1.9);

  const double e1 = max_error(0.02, Scheme::kImplicitEuler);
  const double e2 = max_error(0.01, Scheme::kImplicitEuler);
  CHECK(std::log2(e1 / e2) >= 0.9);

  // Ledger sanity on one midpoint run: the dual norm of the rate divides by
  // (1 + lambda), and the energy identity holds to roundoff.
  Trajectory traj = solve_trajectory(sys, h0, t_final, 0.02, Scheme::kImplicitMidpoint);
  for (const LedgerRow& row : traj.ledger) {
    CHECK(std::abs(row.dth_dual_sq - row.dth_sq / (1.0 + sys.lambdas[0])) <=
          1e-12 * row.dth_sq);
    CHECK(std::abs(row.residual) <= 1e-12 * (1.0 + row.energy0));
  }
}

TEST_CASE("constant forcing settles at the spectral steady state", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 3);
  SourceSpec spec = zero_sources(s.cx);
  spec.jm = TimeSeries::constant(Vec(basis.psis.col(0)));
  validate_sources(s.cx, s.forms, spec, {0.0, 1.0});
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, spec));
  const Vec b = sys.forcing(0.0);
  CHECK(std::abs(b[0] - 1.0) <= 1e-7);

  Trajectory traj = solve_trajectory(sys, Vec::Zero(3), 3.0, 0.02);
  const Vec h_end = traj.h.col(Index(traj.times.size()) - 1);
  const double target = b[0] / sys.s(0, 0);
  CHECK(std::abs(h_end[0] - target) <= 1e-6 * std::abs(target));
  CHECK(std::abs(h_end[1]) <= 1e-6);
  CHECK(std::abs(h_end[2]) <= 1e-6);
}

TEST_CASE("recovered field satisfies the single-mode energy identity", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 1);
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, zero_sources(s.cx)));
  const Vec e = recover_E(sys, Vec::Ones(1), 0.0);
  const double energy = e.dot(s.forms.m_face * e);
  CHECK(std::abs(energy - basis.lambdas[0]) <= 1e-7 * basis.lambdas[0]);
}

TEST_CASE("initial electric field obeys the material bound", "[galerkin]") {
  for (int layered : {0, 1}) {
    Setup s = layered ? make_setup(4, 1.0, Sym3::identity(), 2.0) : make_setup(4);
    if (layered) {
      s.model = two_layer(s.cx, 1.0, 1.0, Sym3::identity(0.5), Sym3::identity(2.0), 0.5, 2.0);
      s.forms = assemble_forms(s.cx, s.model);
    }
    EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 6);
    SourceSpec spec = zero_sources(s.cx);
    spec.je = TimeSeries::constant(oracle::random_vec(s.cx.n_edges, 7u));
    Vec c(6);
    for (int i = 0; i < 6; ++i) c[i] = 1.0 / double(i + 1);
    spec.h0 = reconstruct(basis, c);
    ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, spec));

    const Vec e0 = recover_E(sys, c, 0.0);
    const double norm_e = detail::weighted_norm(s.forms.m_face, e0);
    const Vec curl_h0 = s.cx.curl * spec.h0;
    const double norm_curl = detail::weighted_norm(s.forms.m_face, curl_h0);
    const double norm_je = detail::weighted_norm(s.forms.m_edge, spec.je(0.0));
    CHECK(norm_e <= s.model.lambda * (1.0 + 1e-9) * (norm_curl + norm_je));
    CHECK(norm_e > 0.0);
  }
}

TEST_CASE("trajectories are linear in the data", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 4);
  const Vec profile_a = oracle::random_vec(s.cx.n_edges, 11u);
  const Vec profile_b = oracle::random_vec(s.cx.n_edges, 12u);
  Vec mix_a = Vec::Zero(4), mix_b = Vec::Zero(4);
  mix_a[0] = 1.0;
  mix_a[2] = -0.5;
  mix_b[1] = 0.7;
  mix_b[3] = 0.2;

  auto make = [&](const Vec& profile, const Vec& mix, double phase) {
    SourceSpec spec = zero_sources(s.cx);
    spec.je = TimeSeries::scaled(profile, [phase](double t) { return std::cos(t + phase); });
    spec.jm = TimeSeries::scaled(Vec(basis.psis * mix),
                                 [phase](double t) { return std::exp(-t) + phase; });
    return spec;
  };
  SourceSpec sa = make(profile_a, mix_a, 0.0);
  SourceSpec sb = make(profile_b, mix_b, 0.3);
  SourceSpec sum = zero_sources(s.cx);
  sum.je = TimeSeries::callable(s.cx.n_edges,
                                [&sa, &sb](double t) { return Vec(sa.je(t) + sb.je(t)); });
  sum.jm = TimeSeries::callable(s.cx.n_edges,
                                [&sa, &sb](double t) { return Vec(sa.jm(t) + sb.jm(t)); });

  const Vec ca = oracle::random_vec(4, 21u);
  const Vec cb = oracle::random_vec(4, 22u);
  ReducedSystem sys_a = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, sa));
  ReducedSystem sys_b = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, sb));
  ReducedSystem sys_sum = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, sum));

  const double t_final = 0.5, dt = 0.05;
  Trajectory ta = solve_trajectory(sys_a, ca, t_final, dt);
  Trajectory tb = solve_trajectory(sys_b, cb, t_final, dt);
  Trajectory tsum = solve_trajectory(sys_sum, Vec(ca + cb), t_final, dt);

  double scale = 0.0, diff = 0.0;
  for (Index k = 0; k < Index(tsum.times.size()); ++k) {
    scale = std::max(scale, tsum.h.col(k).norm());
    diff = std::max(diff, (ta.h.col(k) + tb.h.col(k) - tsum.h.col(k)).norm());
  }
  CHECK(diff <= 1e-10 * scale);

  const Vec ea = recover_E(sys_a, ta.h.col(10), t_final);
  const Vec eb = recover_E(sys_b, tb.h.col(10), t_final);
  const Vec esum = recover_E(sys_sum, tsum.h.col(10), t_final);
  CHECK((ea + eb - esum).norm() <= 1e-10 * esum.norm());
}

TEST_CASE("modes evolve independently under identity conductivity", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 4);
  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, zero_sources(s.cx)));
  const double dt = 0.05;
  Trajectory traj = solve_trajectory(sys, Vec::Ones(4), 0.5, dt);
  for (Index k = 0; k < Index(traj.times.size()); ++k) {
    for (Index j = 0; j < 4; ++j) {
      const double ref = midpoint_power(sys.s(j, j), dt, k);
      CHECK(std::abs(traj.h(j, k) - ref) <= 1e-7);
    }
  }
}

TEST_CASE("weak balance residuals vanish along computed trajectories", "[galerkin]") {
  Setup s = make_setup(4);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 6);
  SourceSpec spec = zero_sources(s.cx);
  spec.je = TimeSeries::scaled(oracle::random_vec(s.cx.n_edges, 31u),
                               [](double t) { return std::cos(3.0 * t); });
  Vec mix(6);
  for (int i = 0; i < 6; ++i) mix[i] = (i % 2 ? -1.0 : 1.0) / double(i + 1);
  spec.jm = TimeSeries::scaled(Vec(basis.psis * mix), [](double t) { return std::exp(-t); });
  validate_sources(s.cx, s.forms, spec, {0.0, 0.2, 0.4});

  ReducedSystem sys = reduce(s.cx, s.forms, basis, homogenize(s.cx, s.forms, spec));
  const Vec c0 = oracle::random_vec(6, 33u);
  for (Scheme scheme : {Scheme::kImplicitMidpoint, Scheme::kImplicitEuler}) {
    Trajectory traj = solve_trajectory(sys, c0, 0.4, 0.05, scheme);
    WeakResiduals res = weak_residual(s.cx, s.forms, basis, sys, traj);
    CHECK(res.ampere <= 1e-11);
    CHECK(res.faraday <= 1e-11);
    if (scheme == Scheme::kImplicitMidpoint) {
      for (const LedgerRow& row : traj.ledger)
        CHECK(std::abs(row.residual) <= 1e-11 * (1.0 + row.energy0));
    }
  }
}

TEST_CASE("boundary lifting accepts compatible data and homogenizes it", "[galerkin]") {
  Setup s = make_setup(4, 2.0);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 4);
  const Vec h0 = Vec(0.3 * basis.psis.col(1) + 0.1 * basis.psis.col(0));

  SourceSpec spec = zero_sources(s.cx);
  spec.h0 = h0;
  std::vector<double> times = {0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<Vec> samples(times.size(), h0);
  spec.lifting = TimeSeries::table(times, samples);

  HomogenizedSources hom = lift_boundary(s.cx, s.forms, spec);
  CHECK(hom.lifted);
  CHECK(hom.compatibility_residual <= 1e-10);
  CHECK(hom.h0.norm() == 0.0);
  const Vec expected_je = Vec(-(s.forms.m_face * (s.cx.curl * h0)));
  CHECK((hom.je_face_pair(0.25) - expected_je).norm() <= 1e-12 * expected_je.norm());
  CHECK(hom.jm_edge_pair(0.2).norm() <= 1e-12);

  ReducedSystem sys = reduce(s.cx, s.forms, basis, hom);
  Trajectory traj = solve_trajectory(sys, Vec::Zero(4), 0.4, 0.05);
  WeakResiduals res = weak_residual(s.cx, s.forms, basis, sys, traj);
  CHECK(res.ampere <= 1e-10);
  CHECK(res.faraday <= 1e-10);
}

TEST_CASE("boundary lifting rejects incompatible data", "[galerkin]") {
  Setup s = make_setup(4, 2.0);
  const Vec h0 = Vec::Zero(s.cx.n_edges);
  Vec z = oracle::random_vec(s.cx.n_edges, 41u);
  for (Index e = 0; e < s.cx.n_edges; ++e)
    if (s.cx.edge_on_boundary[size_t(e)]) z[e] = 0.0;

  SourceSpec spec = zero_sources(s.cx);
  spec.h0 = h0;
  std::vector<double> times = {0.0, 0.2, 0.4};
  std::vector<Vec> samples;
  for (double t : times) samples.push_back(Vec(h0 + t * z));
  spec.lifting = TimeSeries::table(times, samples);
  CHECK_THROWS_AS(lift_boundary(s.cx, s.forms, spec), ValidationError);
}

TEST_CASE("boundary lifting cancels a compensated magnetic source", "[galerkin]") {
  Setup s = make_setup(4, 2.0);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 2);
  const Vec h0 = Vec(0.3 * basis.psis.col(1));
  const Vec z = basis.psis.col(0);

  // Magnetic source matching the weighted rate of the boundary data: the
  // edge-mass representative of (mu z).
  Vec jm_field = Vec::Zero(s.cx.n_edges);
  CgOptions opts;
  opts.rel_tol = 1e-13;
  solve_spd(s.forms.m_edge, Vec(s.forms.m_mu_edge * z), jm_field, opts);

  SourceSpec spec = zero_sources(s.cx);
  spec.h0 = h0;
  spec.jm = TimeSeries::constant(jm_field);
  validate_sources(s.cx, s.forms, spec, {0.0, 0.4});
  std::vector<double> times = {0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<Vec> samples;
  for (double t : times) samples.push_back(Vec(h0 + t * z));
  spec.lifting = TimeSeries::table(times, samples);

  HomogenizedSources hom = lift_boundary(s.cx, s.forms, spec);
  CHECK(hom.lifted);
  CHECK(hom.h0.norm() == 0.0);
  const double jm_scale = (s.forms.m_mu_edge * z).norm();
  for (double t : {0.0, 0.15, 0.4})
    CHECK(hom.jm_edge_pair(t).norm() <= 1e-9 * jm_scale);
}

TEST_CASE("initial projection reports and drops inadmissible parts", "[galerkin]") {
  Setup s = make_setup(4, 2.0);
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 4);
  Vec c(4);
  c << 0.2, -1.0, 0.5, 0.1;
  const Vec clean = reconstruct(basis, c);

  InitialProjection pure = project_initial(s.cx, s.forms, basis, clean);
  CHECK((pure.coeffs - c).norm() <= 1e-8 * c.norm());
  CHECK(pure.warnings.empty());
  CHECK(pure.captured_norm <= pure.input_norm * (1.0 + 1e-10));

  // Add a weighted-gradient part and a boundary poke; both must be reported.
  const SpMat pn = interior_node_selector(s.cx);
  Vec q = oracle::random_vec(pn.rows(), 51u);
  const Vec grad_part = Vec(s.cx.grad * (pn.transpose() * q));
  Vec dirty = Vec(clean + grad_part);
  for (Index e = 0; e < s.cx.n_edges; ++e) {
    if (s.cx.edge_on_boundary[size_t(e)]) {
      dirty[e] += 1.0;
      break;
    }
  }
  InitialProjection proj = project_initial(s.cx, s.forms, basis, dirty);
  REQUIRE(proj.warnings.size() == 2);
  const double grad_norm = detail::weighted_norm(s.forms.m_mu_edge, grad_part);
  CHECK(std::abs(proj.dropped_gradient_norm - grad_norm) <= 1e-6 * grad_norm);
  CHECK((proj.coeffs - c).norm() <= 1e-7 * c.norm());
  CHECK(proj.captured_norm <= proj.input_norm * (1.0 + 1e-10));

  InitialProjection zero = project_initial(s.cx, s.forms, basis, Vec::Zero(s.cx.n_edges));
  CHECK(zero.coeffs.norm() == 0.0);
  CHECK(zero.warnings.empty());
}

TEST_CASE("degenerate conductivity is rejected structurally", "[galerkin]") {
  Setup s = make_setup(4);
  // A vanishing conductivity is caught while building the weighted forms.
  MaterialModel degenerate =
      two_layer(s.cx, 1.0, 1.0, Sym3::identity(1.0), Sym3::identity(0.0), 0.5, 1.0);
  CHECK_THROWS_AS(assemble_forms(s.cx, degenerate), ValidationError);

  // A flux mass that fails the positive-definite factorization is caught in
  // the reduction step rather than producing garbage coefficients.
  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 2);
  WeightedForms broken = s.forms;
  broken.m_sigma_face = SpMat(-broken.m_sigma_face);
  CHECK_THROWS_AS(
      reduce(s.cx, broken, basis, homogenize(s.cx, broken, zero_sources(s.cx))),
      SolverError);
}

TEST_CASE("source validation flags non-solenoidal magnetic data", "[galerkin]") {
  Setup s = make_setup(4);
  SourceSpec spec = zero_sources(s.cx);
  spec.jm = TimeSeries::constant(oracle::random_vec(s.cx.n_edges, 61u));
  CHECK(x_membership_residual(s.cx, s.forms, spec.jm(0.0)) > 0.1);
  CHECK_THROWS_AS(validate_sources(s.cx, s.forms, spec, {0.0}), ValidationError);

  EigenBasis basis = magnetic_eigenbasis(s.cx, s.forms, 2);
  spec.jm = TimeSeries::constant(Vec(basis.psis.col(0)));
  CHECK(x_membership_residual(s.cx, s.forms, spec.jm(0.0)) <= 1e-6);
  validate_sources(s.cx, s.forms, spec, {0.0});
}
