// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eddycurl/assembly.hpp"
#include "eddycurl/grid.hpp"
#include "eddycurl/types.hpp"

namespace eddycurl {

/// An edge field depending on time.  Backed either by a closed form or by a
/// sample table with piecewise-linear interpolation (clamped outside the
/// sampled range).  Tables additionally expose finite-difference derivatives.
class TimeSeries {
 public:
  TimeSeries() = default;

  static TimeSeries zero(Index len) {
    TimeSeries s;
    s.len_ = len;
    s.eval_ = [len](double) { return Vec(Vec::Zero(len)); };
    return s;
  }

  static TimeSeries constant(Vec field) {
    TimeSeries s;
    s.len_ = field.size();
    s.eval_ = [field = std::move(field)](double) { return field; };
    return s;
  }

  /// Fixed spatial profile with a scalar amplitude in time.
  static TimeSeries scaled(Vec field, std::function<double(double)> amplitude) {
    TimeSeries s;
    s.len_ = field.size();
    s.eval_ = [field = std::move(field), amplitude = std::move(amplitude)](double t) {
      return Vec(amplitude(t) * field);
    };
    return s;
  }

  static TimeSeries callable(Index len, std::function<Vec(double)> fn) {
    TimeSeries s;
    s.len_ = len;
    s.eval_ = std::move(fn);
    return s;
  }

  static TimeSeries table(std::vector<double> times, std::vector<Vec> samples) {
    if (times.size() < 2 || times.size() != samples.size())
      throw ValidationError("TimeSeries: a table needs matching times and samples (>= 2)");
    for (size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw ValidationError("TimeSeries: table times must increase strictly");
    const Index len = samples.front().size();
    for (const Vec& v : samples)
      if (v.size() != len) throw ValidationError("TimeSeries: table samples differ in length");
    TimeSeries s;
    s.len_ = len;
    s.times_ = std::move(times);
    s.samples_ = std::move(samples);
    return s;
  }

  Vec operator()(double t) const {
    if (!times_.empty()) return interpolate(t);
    if (!eval_) throw ValidationError("TimeSeries: evaluated before initialization");
    return eval_(t);
  }

  Index size() const { return len_; }
  bool is_table() const { return !times_.empty(); }
  const std::vector<double>& sample_times() const { return times_; }
  const std::vector<Vec>& samples() const { return samples_; }

  /// Centered-difference time derivative at table node k (one-sided at the
  /// endpoints).  Only meaningful for tables.
  Vec table_derivative(size_t k) const {
    if (times_.empty()) throw ValidationError("TimeSeries: derivative needs a table");
    const size_t last = times_.size() - 1;
    if (k > last) throw ValidationError("TimeSeries: derivative index out of range");
    if (k == 0) return Vec((samples_[1] - samples_[0]) / (times_[1] - times_[0]));
    if (k == last)
      return Vec((samples_[last] - samples_[last - 1]) / (times_[last] - times_[last - 1]));
    return Vec((samples_[k + 1] - samples_[k - 1]) / (times_[k + 1] - times_[k - 1]));
  }

 private:
  Vec interpolate(double t) const {
    if (t <= times_.front()) return samples_.front();
    if (t >= times_.back()) return samples_.back();
    size_t hi = 1;
    while (times_[hi] < t) ++hi;
    const double w = (t - times_[hi - 1]) / (times_[hi] - times_[hi - 1]);
    return Vec((1.0 - w) * samples_[hi - 1] + w * samples_[hi]);
  }

  Index len_ = 0;
  std::function<Vec(double)> eval_;
  std::vector<double> times_;
  std::vector<Vec> samples_;
};

/// Problem data: volume sources, initial field, optional boundary lifting.
/// All spatial fields are edge cochains.
struct SourceSpec {
  TimeSeries je;  ///< electric-side source
  TimeSeries jm;  ///< magnetic-side source
  Vec h0;         ///< initial magnetic field
  std::optional<TimeSeries> lifting;  ///< boundary data G(t), sampled as a table
};

/// Relative weak-divergence residual of an edge field: how far the field is
/// from the unweighted divergence-free space, tested at interior nodes.
inline double x_membership_residual(const Complex& cx, const WeightedForms& forms,
                                    const Vec& field) {
  const Vec pair = forms.m_edge * field;
  Vec div(cx.interior_nodes.size());
  const Vec full = cx.grad.transpose() * pair;
  for (size_t i = 0; i < cx.interior_nodes.size(); ++i)
    div[Eigen::Index(i)] = full[cx.interior_nodes[i]];
  const double scale = pair.norm();
  return scale > 0.0 ? div.norm() / scale : 0.0;
}

/// Checks the magnetic source against the divergence-free data hypothesis at
/// the given times.  The tolerance is relative and deliberately loose by
/// default: sampled smooth divergence-free fields carry an O(h^2) discrete
/// divergence, and only grossly non-solenoidal data should be rejected.
inline void validate_sources(const Complex& cx, const WeightedForms& forms,
                             const SourceSpec& spec, const std::vector<double>& times,
                             double tol = 0.1) {
  if (spec.h0.size() != cx.n_edges)
    throw ValidationError("validate_sources: initial field length mismatch");
  if (spec.je.size() != cx.n_edges || spec.jm.size() != cx.n_edges)
    throw ValidationError("validate_sources: source field length mismatch");
  for (double t : times) {
    const double res = x_membership_residual(cx, forms, spec.jm(t));
    if (res > tol)
      throw ValidationError("validate_sources: magnetic source at t=" + std::to_string(t) +
                            " has weak-divergence residual " + std::to_string(res) +
                            " above tolerance " + std::to_string(tol));
  }
}

/// Sources in paired form, ready for the reduced system: the electric source
/// paired against the flux basis, the magnetic source against edge fields,
/// and a homogenized initial field.
struct HomogenizedSources {
  Index n_faces = 0;
  Index n_edges = 0;
  std::function<Vec(double)> je_face_pair;  ///< t -> vector of (J~E, phi_i)
  std::function<Vec(double)> jm_edge_pair;  ///< t -> vector of (J~M, W_e)
  Vec h0;                                   ///< homogenized initial edge field
  double compatibility_residual = 0.0;      ///< max constraint residual (lifting)
  bool lifted = false;
};

/// Pairs the sources without boundary lifting.
inline HomogenizedSources homogenize(const Complex& cx, const WeightedForms& forms,
                                     const SourceSpec& spec) {
  HomogenizedSources out;
  out.n_faces = cx.n_faces;
  out.n_edges = cx.n_edges;
  const SpMat& mfe = forms.m_face_edge;
  const SpMat& m1 = forms.m_edge;
  const TimeSeries je = spec.je;
  const TimeSeries jm = spec.jm;
  out.je_face_pair = [mfe, je](double t) { return Vec(mfe * je(t)); };
  out.jm_edge_pair = [m1, jm](double t) { return Vec(m1 * jm(t)); };
  out.h0 = spec.h0;
  return out;
}

/// Converts boundary data into homogenized volume sources: the lifted
/// unknown F = H - G obeys the homogeneous-boundary system with sources
/// J~E = JE - curl G, J~M = JM - mu dG/dt, F(0) = H0 - G(0).  The boundary
/// data must satisfy the divergence compatibility condition linking G, the
/// initial field, and the accumulated magnetic source; violations are
/// rejected with the residual in the message.
inline HomogenizedSources lift_boundary(const Complex& cx, const WeightedForms& forms,
                                        const SourceSpec& spec,
                                        double compatibility_tol = 1e-8) {
  if (!spec.lifting || !spec.lifting->is_table())
    throw ValidationError("lift_boundary: boundary data must be a sampled table");
  const TimeSeries& g = *spec.lifting;
  if (g.size() != cx.n_edges)
    throw ValidationError("lift_boundary: boundary field length mismatch");
  const std::vector<double>& times = g.sample_times();
  const std::vector<Vec>& gs = g.samples();

  // Compatibility: at every sample, the weighted divergence of (G - H0) must
  // equal the accumulated divergence of the magnetic source (trapezoid rule).
  const SpMat pn = interior_node_selector(cx);
  const SpMat div_unweighted = SpMat(pn * SpMat(cx.grad.transpose()));
  double worst = 0.0;
  double scale = 0.0;
  Vec jm_accum = Vec::Zero(cx.interior_nodes.size());
  Vec jm_prev = div_unweighted * (forms.m_edge * spec.jm(times.front()));
  for (size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const Vec jm_curr = div_unweighted * (forms.m_edge * spec.jm(times[k]));
      jm_accum += 0.5 * (times[k] - times[k - 1]) * (jm_prev + jm_curr);
      jm_prev = jm_curr;
    }
    const Vec res = forms.b_div * Vec(gs[k] - spec.h0) - jm_accum;
    worst = std::max(worst, res.lpNorm<Eigen::Infinity>());
    scale = std::max(scale, (forms.m_mu_edge * gs[k]).lpNorm<Eigen::Infinity>());
  }
  const double rel = worst / std::max(scale, 1e-300);
  if (rel > compatibility_tol)
    throw ValidationError(
        "lift_boundary: boundary data incompatible with the initial field and "
        "magnetic source; relative divergence residual " +
        std::to_string(rel) + " exceeds " + std::to_string(compatibility_tol));

  HomogenizedSources out;
  out.n_faces = cx.n_faces;
  out.n_edges = cx.n_edges;
  out.lifted = true;
  out.compatibility_residual = rel;
  out.h0 = spec.h0 - gs.front();

  // Precompute per-sample pairings; evaluation interpolates them linearly.
  std::vector<Vec> je_pairs(times.size()), jm_pairs(times.size());
  for (size_t k = 0; k < times.size(); ++k) {
    je_pairs[k] = forms.m_face_edge * spec.je(times[k]) -
                  forms.m_face * (cx.curl * gs[k]);
    jm_pairs[k] = forms.m_edge * spec.jm(times[k]) -
                  forms.m_mu_edge * g.table_derivative(k);
  }
  TimeSeries je_series = TimeSeries::table(times, std::move(je_pairs));
  TimeSeries jm_series = TimeSeries::table(times, std::move(jm_pairs));
  out.je_face_pair = [je_series](double t) { return je_series(t); };
  out.jm_edge_pair = [jm_series](double t) { return jm_series(t); };
  return out;
}

}  // namespace eddycurl
