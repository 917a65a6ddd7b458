#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "alignkit/core_geometry.hpp"
#include "alignkit/procrustes.hpp"

namespace alignkit {

/// Errors between a source embedding (timestep t) and a target embedding
/// (timestep t+1), with the intermediates they were computed from. All four
/// errors describe the pair before any correction.
struct AlignmentReport {
  double xi_tr = 0.0;
  double xi_rot = 0.0;
  double xi_sc = 0.0;
  double xi_st = 0.0;
  double t_glob = 0.0;
  double t_norm = 0.0;
  double radius_s = 0.0;
  double radius_t = 0.0;
  Vector centroid_s;
  Vector centroid_t;
  int det_sign = 1;
  std::vector<double> angles;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
};

/// Aligned matrices are centered, oriented onto each other and scaled to
/// unit radius.
struct AlignedPair {
  EmbeddingMatrix aligned_s;
  EmbeddingMatrix aligned_t;
  AlignmentReport report;
};

struct TranslationError {
  double xi_tr = 0.0;
  double t_glob = 0.0;
  double t_norm = 0.0;
};

namespace detail {

inline double bounded_ratio(double t_norm) { return t_norm / (t_norm + 1.0); }

inline TranslationError translation_from(const GeometrySummary& s, const GeometrySummary& t) {
  const double denom = s.radius + t.radius;
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::NonPositiveRadius,
                "translation error undefined: both embeddings are degenerate (zero radius)");
  }
  TranslationError e;
  e.t_glob = (t.centroid - s.centroid).norm();
  e.t_norm = e.t_glob / denom;
  e.xi_tr = bounded_ratio(e.t_norm);
  return e;
}

}  // namespace detail

/// Centroid displacement normalized by the summed radii, mapped into [0, 1).
/// Tangent clouds (displacement equal to the summed radii) give 0.5.
inline TranslationError translation_error(const EmbeddingMatrix& s, const EmbeddingMatrix& t) {
  require_same_shape(s, t);
  return detail::translation_from(summarize(s), summarize(t));
}

/// |R - I|_F / (2 sqrt(d)). 0 for the identity, 1 for -I.
inline double rotation_error(const OrthogonalTransform& r) {
  const auto d = static_cast<double>(r.dimension());
  const Matrix id = Matrix::Identity(r.dimension(), r.dimension());
  return std::min(1.0, (r.matrix() - id).norm() / (2.0 * std::sqrt(d)));
}

/// Same quantity through the trace: sqrt(2d - 2 Tr R) / (2 sqrt(d)).
inline double rotation_error_from_trace(const OrthogonalTransform& r) {
  const auto d = static_cast<double>(r.dimension());
  const double radicand = std::max(0.0, 2.0 * d - 2.0 * r.trace());
  return std::min(1.0, std::sqrt(radicand) / (2.0 * std::sqrt(d)));
}

inline double rotation_error_from_angles(const CanonicalForm& cf) {
  const auto d = static_cast<double>(cf.dimension);
  double cos_sum = 0.0;
  for (double a : cf.angles) cos_sum += std::cos(a);
  const double radicand = std::max(0.0, 2.0 * d - 4.0 * cos_sum - 2.0 * cf.mu);
  return std::min(1.0, std::sqrt(radicand) / (2.0 * std::sqrt(d)));
}

inline double scale_error(double r_s, double r_t) {
  if (!(r_s >= 0.0) || !(r_t >= 0.0) || !(r_s + r_t > 0.0)) {
    throw Error(ErrorKind::NonPositiveRadius, "scale error needs nonnegative radii with positive sum");
  }
  return std::abs(r_s - r_t) / (r_s + r_t);
}

/// Mean over rows of |n_t - n_s| / (|n_s| + |n_t|).
///
/// A row at the origin in both matrices contributes 0. Otherwise the term is
/// bounded by 1 through the triangle inequality, including a row that leaves
/// or reaches the origin (which contributes exactly 1).
inline double stability_error(const EmbeddingMatrix& s, const EmbeddingMatrix& t) {
  require_same_shape(s, t);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    const double ns = s.row(i).norm();
    const double nt = t.row(i).norm();
    const double denom = ns + nt;
    if (denom == 0.0) continue;
    sum += std::min(1.0, (t.row(i) - s.row(i)).norm() / denom);
  }
  return sum / static_cast<double>(s.n());
}

/// Measure-then-correct pipeline:
///   1. translation error on the raw inputs, then center both;
///   2. Procrustes rotation of the source onto the target, rotation error,
///      then rotate the source;
///   3. scale error from the radii, then normalize each by its own radius;
///   4. stability error between the normalized matrices.
inline AlignedPair align_pair(const EmbeddingMatrix& s, const EmbeddingMatrix& t) {
  require_same_shape(s, t);
  const GeometrySummary gs = summarize(s);
  const GeometrySummary gt = summarize(t);

  AlignmentReport report;
  report.n = s.n();
  report.d = s.d();
  const TranslationError tr = detail::translation_from(gs, gt);
  report.xi_tr = tr.xi_tr;
  report.t_glob = tr.t_glob;
  report.t_norm = tr.t_norm;
  report.centroid_s = gs.centroid;
  report.centroid_t = gt.centroid;
  report.radius_s = gs.radius;
  report.radius_t = gt.radius;

  if (!(gs.radius > 0.0) || !(gt.radius > 0.0)) {
    throw Error(ErrorKind::NonPositiveRadius,
                std::string("cannot align: ") + (gs.radius > 0.0 ? "target" : "source") +
                    " embedding is degenerate (zero radius)");
  }

  const EmbeddingMatrix cs(s.data().rowwise() - gs.centroid.transpose());
  const EmbeddingMatrix ct(t.data().rowwise() - gt.centroid.transpose());

  const OrthogonalTransform r = optimal_rotation(cs, ct);
  report.xi_rot = rotation_error(r);
  report.det_sign = r.det_sign();
  report.angles = canonical_form(r).angles;
  const EmbeddingMatrix cs_rotated = apply_rotation(cs, r);

  report.xi_sc = scale_error(gs.radius, gt.radius);
  EmbeddingMatrix ns = scale_normalize(cs_rotated, gs.radius);
  EmbeddingMatrix nt = scale_normalize(ct, gt.radius);

  report.xi_st = stability_error(ns, nt);
  return AlignedPair{std::move(ns), std::move(nt), std::move(report)};
}

struct AlignedSequence {
  std::vector<EmbeddingMatrix> aligned;
  std::vector<AlignmentReport> reports;
};

/// Aligns every snapshot into the frame of the first one. The first output
/// is the centered, unit-radius first snapshot; each later snapshot is
/// centered, rotated onto the previous aligned output and normalized.
/// Report t describes the raw pair (E_t, E_t+1) before any correction.
/// Errors carry the 1-based timestep of the offending snapshot.
inline AlignedSequence align_sequence(std::span<const EmbeddingMatrix> snapshots) {
  if (snapshots.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "sequence alignment needs at least two snapshots");
  }
  AlignedSequence out;
  out.aligned.reserve(snapshots.size());
  out.reports.reserve(snapshots.size() - 1);

  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    try {
      if (t > 0) require_same_shape(snapshots[0], snapshots[t]);
      const GeometrySummary g = summarize(snapshots[t]);
      const EmbeddingMatrix c(snapshots[t].data().rowwise() - g.centroid.transpose());
      if (t == 0) {
        out.aligned.push_back(scale_normalize(c, g.radius));
        continue;
      }
      out.reports.push_back(align_pair(snapshots[t - 1], snapshots[t]).report);
      const OrthogonalTransform r = optimal_rotation(c, out.aligned.back());
      out.aligned.push_back(scale_normalize(apply_rotation(c, r), g.radius));
    } catch (const Error& e) {
      throw Error::at_timestep(e, t + 1);
    }
  }
  return out;
}

}  // namespace alignkit
