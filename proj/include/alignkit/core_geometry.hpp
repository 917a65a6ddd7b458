#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "alignkit/error.hpp"

namespace alignkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance for "zero" checks. Scaled by matrix magnitude where a
/// check depends on the size of the entries.
inline constexpr double kTolerance = 1e-9;

inline std::string shape_string(Eigen::Index n, Eigen::Index d) {
  return std::to_string(n) + "x" + std::to_string(d);
}

/// One latent-space snapshot: row i holds object i's coordinates.
///
/// Immutable once constructed. Construction rejects empty shapes and
/// non-finite entries, so every EmbeddingMatrix in circulation is valid.
class EmbeddingMatrix {
 public:
  explicit EmbeddingMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1) {
      throw Error(ErrorKind::InvalidArgument,
                  "embedding matrix must have at least one row and one column, got " +
                      shape_string(data_.rows(), data_.cols()));
    }
    if (!data_.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "embedding matrix contains non-finite entries");
    }
  }

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index d() const noexcept { return data_.cols(); }
  auto row(Eigen::Index i) const { return data_.row(i); }

  /// Largest absolute entry; the magnitude scale for relative tolerances.
  double max_abs() const { return data_.cwiseAbs().maxCoeff(); }

  bool same_shape(const EmbeddingMatrix& other) const noexcept {
    return n() == other.n() && d() == other.d();
  }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  Matrix data_;
};

struct GeometrySummary {
  Vector centroid;
  double radius = 0.0;
};

struct Centered {
  EmbeddingMatrix matrix;
  Vector centroid;
};

inline void require_same_shape(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch, "shape mismatch: " + shape_string(a.n(), a.d()) +
                                              " vs " + shape_string(b.n(), b.d()));
  }
}

inline Vector centroid(const EmbeddingMatrix& e) {
  return e.data().colwise().mean().transpose();
}

namespace detail {

inline bool all_rows_equal(const Matrix& m) {
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    if (m.row(i) != m.row(0)) return false;
  }
  return true;
}

inline double radius_about(const Matrix& m, const Vector& o) {
  // Identical rows: the mean can round away from the shared row.
  if (all_rows_equal(m)) return 0.0;
  return (m.rowwise() - o.transpose()).rowwise().norm().mean();
}

}  // namespace detail

/// Mean Euclidean distance of the rows to the centroid. Exactly 0 iff all
/// rows are identical.
inline double radius(const EmbeddingMatrix& e) {
  return detail::radius_about(e.data(), centroid(e));
}

inline GeometrySummary summarize(const EmbeddingMatrix& e) {
  GeometrySummary s;
  s.centroid = centroid(e);
  s.radius = detail::radius_about(e.data(), s.centroid);
  return s;
}

inline Centered center(const EmbeddingMatrix& e) {
  Vector o = centroid(e);
  Matrix c = e.data().rowwise() - o.transpose();
  return Centered{EmbeddingMatrix(std::move(c)), std::move(o)};
}

/// True when the centroid norm is within tolerance, scaled by entry magnitude.
inline bool is_centered(const EmbeddingMatrix& e, double tol = kTolerance) {
  return centroid(e).norm() <= tol * std::max(1.0, e.max_abs());
}

/// Divides every entry by r. r is normally the matrix's own radius; a
/// non-positive r means a degenerate cloud and the normalization is undefined.
inline EmbeddingMatrix scale_normalize(const EmbeddingMatrix& c, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::NonPositiveRadius,
                "cannot normalize by non-positive radius " + std::to_string(r));
  }
  return EmbeddingMatrix(c.data() / r);
}

}  // namespace alignkit
