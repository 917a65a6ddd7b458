#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "alignkit/core_geometry.hpp"
#include "alignkit/random.hpp"

namespace alignkit {

inline constexpr double kOrthogonalityTolerance = 1e-8;

/// A d x d orthogonal matrix (rotation or rotoreflection) and the sign of
/// its determinant.
///
/// Matrices act on row vectors from the right: an embedding C maps to C * R.
/// With the elementary block [cos t, -sin t; sin t, cos t], the row (1, 0)
/// maps to (cos t, -sin t), so a quarter turn sends (1, 0) to (0, -1).
class OrthogonalTransform {
 public:
  explicit OrthogonalTransform(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
      throw Error(ErrorKind::NotOrthogonal, "orthogonal transform must be square, got " +
                                                shape_string(matrix_.rows(), matrix_.cols()));
    }
    if (!matrix_.allFinite()) {
      throw Error(ErrorKind::NotOrthogonal, "orthogonal transform has non-finite entries");
    }
    const auto d = matrix_.rows();
    const double defect = (matrix_.transpose() * matrix_ - Matrix::Identity(d, d)).norm();
    if (defect > kOrthogonalityTolerance) {
      throw Error(ErrorKind::NotOrthogonal,
                  "matrix is not orthogonal: |R^T R - I|_F = " + std::to_string(defect));
    }
    const double det = matrix_.determinant();
    if (std::abs(std::abs(det) - 1.0) > kOrthogonalityTolerance) {
      throw Error(ErrorKind::NotOrthogonal, "|det R| differs from 1: " + std::to_string(det));
    }
    det_sign_ = det > 0.0 ? 1 : -1;
  }

  static OrthogonalTransform identity(Eigen::Index d) {
    return OrthogonalTransform(Matrix::Identity(d, d));
  }

  const Matrix& matrix() const noexcept { return matrix_; }
  int det_sign() const noexcept { return det_sign_; }
  Eigen::Index dimension() const noexcept { return matrix_.rows(); }
  double trace() const { return matrix_.trace(); }

  OrthogonalTransform transpose() const { return OrthogonalTransform(matrix_.transpose()); }

 private:
  Matrix matrix_;
  int det_sign_ = 1;
};

/// Elementary rotation angles of an orthogonal matrix.
///
/// R is similar to a block diagonal matrix of 2x2 rotations by each angle
/// plus fixed +-1 eigenvalues whose count depends on the parity of d and the
/// determinant. `mu` is the summed contribution of those fixed eigenvalues
/// to the trace: +1 for odd d and det +1, -1 for odd d and det -1, 0 for
/// even d. Hence Tr(R) = 2 * sum(cos(angles)) + mu.
struct CanonicalForm {
  std::vector<double> angles;
  int mu = 0;
  int det_sign = 1;
  Eigen::Index dimension = 0;

  double trace() const {
    double t = mu;
    for (double a : angles) t += 2.0 * std::cos(a);
    return t;
  }
};

/// Number of elementary rotation angles in the canonical form of a d x d
/// orthogonal matrix with the given determinant sign.
inline std::size_t canonical_angle_count(Eigen::Index d, bool reflect) {
  if (d % 2 == 1) return static_cast<std::size_t>((d - 1) / 2);
  return static_cast<std::size_t>(reflect ? (d - 2) / 2 : d / 2);
}

inline int canonical_mu(Eigen::Index d, int det_sign) {
  if (d % 2 == 0) return 0;
  return det_sign;
}

/// Orthogonal R minimizing |source * R - target|_F. Reflections are allowed:
/// R = U V^T from the SVD of source^T target, with no determinant correction.
/// Both inputs must already be centered.
inline OrthogonalTransform optimal_rotation(const EmbeddingMatrix& source,
                                            const EmbeddingMatrix& target) {
  require_same_shape(source, target);
  if (!is_centered(source) || !is_centered(target)) {
    throw Error(ErrorKind::NotCentered,
                "optimal_rotation requires centered inputs (centroid norm above tolerance)");
  }
  const Matrix cross = source.data().transpose() * target.data();
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return OrthogonalTransform(svd.matrixU() * svd.matrixV().transpose());
}

inline EmbeddingMatrix apply_rotation(const EmbeddingMatrix& c, const OrthogonalTransform& r) {
  if (c.d() != r.dimension()) {
    throw Error(ErrorKind::ShapeMismatch,
                "cannot apply a " + std::to_string(r.dimension()) + "-dimensional transform to a " +
                    shape_string(c.n(), c.d()) + " matrix");
  }
  return EmbeddingMatrix(c.data() * r.matrix());
}

/// Angles are read off the complex eigenvalue pairs exp(+-i t); real
/// eigenvalues beyond the fixed ones required by parity and determinant
/// pair up into blocks with t = 0 (two +1s) or t = pi (two -1s).
inline CanonicalForm canonical_form(const OrthogonalTransform& r) {
  const Eigen::Index d = r.dimension();
  Eigen::EigenSolver<Matrix> solver(r.matrix(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NotOrthogonal, "eigenvalue decomposition did not converge");
  }

  CanonicalForm form;
  form.dimension = d;
  form.det_sign = r.det_sign();
  form.mu = canonical_mu(d, form.det_sign);

  int plus_ones = 0;
  int minus_ones = 0;
  for (const auto& lambda : solver.eigenvalues()) {
    if (lambda.imag() > 0.0) {
      form.angles.push_back(std::atan2(lambda.imag(), lambda.real()));
    } else if (lambda.imag() == 0.0) {
      (lambda.real() >= 0.0 ? plus_ones : minus_ones) += 1;
    }
  }

  // Remove the fixed eigenvalues of the canonical block structure.
  if (d % 2 == 1) {
    (form.det_sign > 0 ? plus_ones : minus_ones) -= 1;
  } else if (form.det_sign < 0) {
    plus_ones -= 1;
    minus_ones -= 1;
  }
  for (int i = 0; i < plus_ones / 2; ++i) form.angles.push_back(0.0);
  for (int i = 0; i < minus_ones / 2; ++i) form.angles.push_back(std::numbers::pi);

  std::sort(form.angles.begin(), form.angles.end());
  return form;
}

/// Block diagonal canonical matrix: 2x2 rotation blocks for each angle
/// followed by the fixed +-1 entries.
inline Matrix canonical_matrix(Eigen::Index d, std::span<const double> angles, bool reflect) {
  const std::size_t expected = canonical_angle_count(d, reflect);
  if (d < 1 || angles.size() != expected) {
    throw Error(ErrorKind::AngleCountMismatch,
                "dimension " + std::to_string(d) + (reflect ? " with" : " without") +
                    " reflection takes " + std::to_string(expected) + " angle(s), got " +
                    std::to_string(angles.size()));
  }
  Matrix m = Matrix::Zero(d, d);
  Eigen::Index k = 0;
  for (double t : angles) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    m(k, k) = c;
    m(k, k + 1) = -s;
    m(k + 1, k) = s;
    m(k + 1, k + 1) = c;
    k += 2;
  }
  if (d % 2 == 1) {
    m(k, k) = reflect ? -1.0 : 1.0;
  } else if (reflect) {
    m(k, k) = 1.0;
    m(k + 1, k + 1) = -1.0;
  }
  return m;
}

/// Orthogonal matrix with prescribed elementary angles: Q * R_can * Q^T for
/// a Haar-random basis Q drawn from `basis_seed`, or R_can itself when no
/// seed is given.
inline OrthogonalTransform make_rotation(Eigen::Index d, std::span<const double> angles,
                                         bool reflect,
                                         std::optional<std::uint64_t> basis_seed = std::nullopt) {
  const Matrix can = canonical_matrix(d, angles, reflect);
  if (!basis_seed) return OrthogonalTransform(can);
  Rng rng(*basis_seed);
  const Matrix q = random_orthogonal(d, rng);
  return OrthogonalTransform(q * can * q.transpose());
}

}  // namespace alignkit
