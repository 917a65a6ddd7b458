#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alignkit/core_geometry.hpp"
#include "alignkit/procrustes.hpp"
#include "alignkit/random.hpp"

namespace alignkit {

/// Random-walk steps per unit of noise factor. With steps of
/// U(-1, 1) r / (2 sqrt(d)), 25 steps add noise of roughly the original
/// radius.
inline constexpr int kNoiseStepsPerUnit = 25;

/// Child streams of a TransformSpec seed, one per randomized operation.
enum class SynthStream : std::uint64_t { RotationBasis = 1, ShiftDirection = 2, NoiseWalk = 3 };

struct RotationSpec {
  std::vector<double> angles;
  bool reflect = false;
};

/// Recipe for a synthetic perturbation. Factors are in units of the
/// original radius: scale_factor is the ratio of radii, shift_factor the
/// ratio of the shift norm to the radius, noise_factor the number of
/// 25-step random-walk units.
struct TransformSpec {
  double scale_factor = 1.0;
  double shift_factor = 0.0;
  std::optional<Vector> shift_direction;  // empty: uniformly random direction
  std::optional<RotationSpec> rotation;
  double noise_factor = 0.0;
  std::uint64_t seed = 0;

  int noise_steps() const { return static_cast<int>(std::lround(kNoiseStepsPerUnit * noise_factor)); }

  void validate(Eigen::Index d) const {
    if (!(scale_factor > 0.0) || !std::isfinite(scale_factor)) {
      throw Error(ErrorKind::InvalidArgument, "scale factor must be positive and finite");
    }
    if (!(shift_factor >= 0.0) || !std::isfinite(shift_factor)) {
      throw Error(ErrorKind::InvalidArgument, "shift factor must be nonnegative and finite");
    }
    if (!(noise_factor >= 0.0) || !std::isfinite(noise_factor)) {
      throw Error(ErrorKind::InvalidArgument, "noise factor must be nonnegative and finite");
    }
    if (shift_direction && shift_direction->size() != d) {
      throw Error(ErrorKind::ShapeMismatch, "shift direction has " +
                                                std::to_string(shift_direction->size()) +
                                                " components, embedding has " + std::to_string(d));
    }
    if (rotation) {
      const auto expected = canonical_angle_count(d, rotation->reflect);
      if (rotation->angles.size() != expected) {
        throw Error(ErrorKind::AngleCountMismatch,
                    "dimension " + std::to_string(d) + " takes " + std::to_string(expected) +
                        " rotation angle(s), got " + std::to_string(rotation->angles.size()));
      }
    }
  }
};

namespace detail {

inline double require_radius(const EmbeddingMatrix& e, const char* op) {
  const double r = radius(e);
  if (!(r > 0.0)) {
    throw Error(ErrorKind::NonPositiveRadius,
                std::string(op) + " is undefined for a degenerate embedding (zero radius)");
  }
  return r;
}

}  // namespace detail

/// n x d matrix of i.i.d. uniform [0, 1) entries, filled row by row.
inline EmbeddingMatrix random_embedding(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw Error(ErrorKind::InvalidArgument, "random embedding needs n >= 1 and d >= 1");
  }
  Rng rng(seed);
  return EmbeddingMatrix(rng.uniform_matrix(n, d, 0.0, 1.0));
}

/// Dilates (s > 1) or contracts (s < 1) about the centroid.
inline EmbeddingMatrix apply_scale(const EmbeddingMatrix& e, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorKind::InvalidArgument, "scale factor must be positive and finite");
  }
  detail::require_radius(e, "scaling");
  const Vector o = centroid(e);
  return EmbeddingMatrix(((e.data().rowwise() - o.transpose()) * s).rowwise() + o.transpose());
}

/// Translates every row by a vector of norm f * radius(e). Without an
/// explicit direction the direction is uniform on the sphere, drawn from seed.
inline EmbeddingMatrix apply_shift(const EmbeddingMatrix& e, double f,
                                   const std::optional<Vector>& direction, std::uint64_t seed) {
  if (!(f >= 0.0) || !std::isfinite(f)) {
    throw Error(ErrorKind::InvalidArgument, "shift factor must be nonnegative and finite");
  }
  const double r = detail::require_radius(e, "shifting");
  Vector unit;
  if (direction) {
    if (direction->size() != e.d()) {
      throw Error(ErrorKind::ShapeMismatch, "shift direction dimension does not match embedding");
    }
    const double norm = direction->norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::InvalidArgument, "shift direction must be a nonzero finite vector");
    }
    unit = *direction / norm;
  } else {
    Rng rng(seed);
    unit = rng.unit_vector(e.d());
  }
  const Vector v = unit * (f * r);
  return EmbeddingMatrix(e.data().rowwise() + v.transpose());
}

/// Rotates about the centroid, leaving centroid and radius unchanged.
inline EmbeddingMatrix apply_rotation_about_centroid(const EmbeddingMatrix& e,
                                                     const OrthogonalTransform& r) {
  if (e.d() != r.dimension()) {
    throw Error(ErrorKind::ShapeMismatch, "rotation dimension does not match embedding");
  }
  const Vector o = centroid(e);
  return EmbeddingMatrix(((e.data().rowwise() - o.transpose()) * r.matrix()).rowwise() +
                         o.transpose());
}

/// round(25 * noise_factor) steps of E <- E + U(-1, 1) r / (2 sqrt(d)),
/// with r the radius of the input, held fixed for the whole walk.
inline EmbeddingMatrix apply_noise_walk(const EmbeddingMatrix& e, double noise_factor,
                                        std::uint64_t seed) {
  if (!(noise_factor >= 0.0) || !std::isfinite(noise_factor)) {
    throw Error(ErrorKind::InvalidArgument, "noise factor must be nonnegative and finite");
  }
  const double r = detail::require_radius(e, "noise walk");
  const auto steps = std::lround(kNoiseStepsPerUnit * noise_factor);
  if (steps == 0) return e;
  const double step = r / (2.0 * std::sqrt(static_cast<double>(e.d())));
  Rng rng(seed);
  Matrix m = e.data();
  for (long k = 0; k < steps; ++k) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) += rng.uniform(-1.0, 1.0) * step;
  }
  return EmbeddingMatrix(std::move(m));
}

/// Applies rotation, shift, scale and noise walk, in that order. Each
/// randomized step draws from its own child stream of spec.seed.
inline EmbeddingMatrix apply_spec(const EmbeddingMatrix& e, const TransformSpec& spec) {
  spec.validate(e.d());
  EmbeddingMatrix out = e;
  if (spec.rotation) {
    const auto r = make_rotation(e.d(), spec.rotation->angles, spec.rotation->reflect,
                                 split_seed(spec.seed, static_cast<std::uint64_t>(SynthStream::RotationBasis)));
    out = apply_rotation_about_centroid(out, r);
  }
  if (spec.shift_factor > 0.0) {
    out = apply_shift(out, spec.shift_factor, spec.shift_direction,
                      split_seed(spec.seed, static_cast<std::uint64_t>(SynthStream::ShiftDirection)));
  }
  if (spec.scale_factor != 1.0) out = apply_scale(out, spec.scale_factor);
  if (spec.noise_steps() > 0) {
    out = apply_noise_walk(out, spec.noise_factor,
                           split_seed(spec.seed, static_cast<std::uint64_t>(SynthStream::NoiseWalk)));
  }
  return out;
}

/// The rotation a spec applies (identity when it has none).
inline OrthogonalTransform spec_rotation(Eigen::Index d, const TransformSpec& spec) {
  if (!spec.rotation) return OrthogonalTransform::identity(d);
  return make_rotation(d, spec.rotation->angles, spec.rotation->reflect,
                       split_seed(spec.seed, static_cast<std::uint64_t>(SynthStream::RotationBasis)));
}

}  // namespace alignkit
