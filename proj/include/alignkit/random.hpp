#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "alignkit/core_geometry.hpp"

namespace alignkit {

/// SplitMix64 finalizer. Used to derive independent child seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of child stream `stream` under `seed`. Children of distinct
/// (seed, stream) pairs are statistically independent; splitting nests, so
/// a trial seed can itself be split per operation.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seedable generator with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose raw output is fixed by the standard.
/// The standard distributions are not, so uniform and normal variates are
/// derived here: uniform from the top 53 bits, normal by Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(angle);
    has_spare_ = true;
    return mag * std::cos(angle);
  }

  /// Uniform integer in [lo, hi], rejection-sampled.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// rows x cols matrix filled row by row with uniform [a, b) values.
  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double a, double b) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(a, b);
    return m;
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  /// Uniformly distributed direction on the unit sphere (normalized Gaussian).
  Vector unit_vector(Eigen::Index d) {
    Vector v(d);
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) v(j) = normal();
      norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Haar-distributed d x d orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
inline Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  const Matrix g = rng.normal_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace alignkit
