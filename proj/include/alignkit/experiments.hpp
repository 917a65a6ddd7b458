#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alignkit/core_geometry.hpp"
#include "alignkit/metrics.hpp"
#include "alignkit/parallel.hpp"
#include "alignkit/procrustes.hpp"
#include "alignkit/random.hpp"
#include "alignkit/synth.hpp"

namespace alignkit {

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single trial
};

inline Stat summarize_values(std::span<const double> values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

/// Grid of parameter cells, each holding mean and standard deviation of
/// one or more metrics over the trials. A coordinate that does not apply to
/// a cell is NaN.
struct SweepResult {
  struct Cell {
    std::vector<double> coords;
    std::vector<Stat> stats;
  };

  std::string name;
  std::vector<std::string> axes;
  std::vector<std::string> metrics;
  std::vector<Cell> cells;
  int trials = 0;
  std::uint64_t seed = 0;

  std::size_t metric_index(std::string_view metric) const {
    const auto it = std::find(metrics.begin(), metrics.end(), metric);
    if (it == metrics.end()) {
      throw Error(ErrorKind::InvalidArgument, "sweep has no metric '" + std::string(metric) + "'");
    }
    return static_cast<std::size_t>(it - metrics.begin());
  }

  const Stat& stat(std::size_t cell, std::string_view metric) const {
    return cells.at(cell).stats.at(metric_index(metric));
  }
};

/// Inclusive ranges for per-trial random shapes.
struct ShapeRange {
  Eigen::Index n_min = 10;
  Eigen::Index n_max = 10000;
  Eigen::Index d_min = 2;
  Eigen::Index d_max = 32;

  void validate() const {
    if (n_min < 1 || d_min < 1 || n_max < n_min || d_max < d_min) {
      throw Error(ErrorKind::InvalidArgument, "invalid shape range");
    }
  }
};

namespace detail {

// Streams under a trial seed.
inline constexpr std::uint64_t kShapeStream = 11;
inline constexpr std::uint64_t kEmbeddingStream = 12;
inline constexpr std::uint64_t kTransformStream = 13;

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  return split_seed(base, static_cast<std::uint64_t>(trial));
}

struct Shape {
  Eigen::Index n;
  Eigen::Index d;
};

inline Shape sample_shape(const ShapeRange& range, std::uint64_t seed) {
  Rng rng(split_seed(seed, kShapeStream));
  const auto n = static_cast<Eigen::Index>(rng.uniform_int(range.n_min, range.n_max));
  const auto d = static_cast<Eigen::Index>(rng.uniform_int(range.d_min, range.d_max));
  return {n, d};
}

inline void require_nonempty(std::span<const double> grid, const char* what) {
  if (grid.empty()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " grid is empty");
  }
}

inline void require_trials(int trials) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
}

/// Runs metric(cell, trial) -> values for every cell and trial, in parallel,
/// then reduces each cell in trial order.
template <class TrialFn>
void run_trials(SweepResult& result, TrialFn&& trial_fn) {
  const std::size_t cells = result.cells.size();
  const std::size_t trials = static_cast<std::size_t>(result.trials);
  const std::size_t metrics = result.metrics.size();
  std::vector<std::vector<double>> values(cells * trials);
  parallel_for(cells * trials, [&](std::size_t k) {
    values[k] = trial_fn(k / trials, k % trials);
  });
  std::vector<double> column(trials);
  for (std::size_t c = 0; c < cells; ++c) {
    result.cells[c].stats.resize(metrics);
    for (std::size_t m = 0; m < metrics; ++m) {
      for (std::size_t t = 0; t < trials; ++t) column[t] = values[c * trials + t].at(m);
      result.cells[c].stats[m] = summarize_values(column);
    }
  }
}

}  // namespace detail

/// Rotation error over elementary angles, with and without reflection.
///
/// Up to two angles span the full product grid (axes theta_1, theta_2);
/// beyond that every block shares the grid angle. Each cell reports the
/// error of the conjugated matrix (xi_rot) and the closed form in the
/// angles (xi_rot_angles). Basis conjugation leaves the trace unchanged,
/// so the seed only affects rounding.
inline SweepResult sweep_rotation_error(Eigen::Index d, std::span<const double> theta_grid,
                                        const std::vector<bool>& reflect_options,
                                        std::uint64_t seed = 0) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
  detail::require_nonempty(theta_grid, "theta");
  if (reflect_options.empty()) {
    throw Error(ErrorKind::InvalidArgument, "reflect options are empty");
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  SweepResult result;
  result.name = "rotation";
  result.axes = {"reflect", "theta_1", "theta_2"};
  result.metrics = {"xi_rot", "xi_rot_angles"};
  result.trials = 1;
  result.seed = seed;

  std::vector<std::vector<double>> angle_sets;
  for (bool reflect : reflect_options) {
    const std::size_t a = canonical_angle_count(d, reflect);
    const double flag = reflect ? 1.0 : 0.0;
    if (a == 0) {
      result.cells.push_back({{flag, nan, nan}, {}});
      angle_sets.emplace_back();
    } else if (a == 1) {
      for (double t : theta_grid) {
        result.cells.push_back({{flag, t, nan}, {}});
        angle_sets.push_back({t});
      }
    } else if (a == 2) {
      for (double t1 : theta_grid)
        for (double t2 : theta_grid) {
          result.cells.push_back({{flag, t1, t2}, {}});
          angle_sets.push_back({t1, t2});
        }
    } else {
      for (double t : theta_grid) {
        result.cells.push_back({{flag, t, t}, {}});
        angle_sets.emplace_back(a, t);
      }
    }
  }

  detail::run_trials(result, [&](std::size_t cell, std::size_t) {
    const bool reflect = result.cells[cell].coords[0] != 0.0;
    const auto r = make_rotation(d, angle_sets[cell], reflect, split_seed(seed, cell));
    CanonicalForm cf;
    cf.angles = angle_sets[cell];
    cf.dimension = d;
    cf.det_sign = reflect ? -1 : 1;
    cf.mu = canonical_mu(d, cf.det_sign);
    return std::vector<double>{rotation_error(r), rotation_error_from_angles(cf)};
  });
  return result;
}

/// Scale and translation errors after shifting by f then scaling by s
/// (about the shifted centroid), on random uniform embeddings whose shape
/// is drawn per trial. Trials share embeddings across cells.
inline SweepResult sweep_scale_translation(std::span<const double> scale_grid,
                                           std::span<const double> shift_grid, int trials,
                                           std::uint64_t seed, const ShapeRange& shapes = {}) {
  detail::require_nonempty(scale_grid, "scale");
  detail::require_nonempty(shift_grid, "shift");
  detail::require_trials(trials);
  shapes.validate();

  SweepResult result;
  result.name = "scale-shift";
  result.axes = {"scale", "shift"};
  result.metrics = {"xi_sc", "xi_tr"};
  result.trials = trials;
  result.seed = seed;
  for (double s : scale_grid)
    for (double f : shift_grid) result.cells.push_back({{s, f}, {}});

  detail::run_trials(result, [&](std::size_t cell, std::size_t trial) {
    const std::uint64_t ts = detail::trial_seed(seed, trial);
    const auto shape = detail::sample_shape(shapes, ts);
    const EmbeddingMatrix e =
        random_embedding(shape.n, shape.d, split_seed(ts, detail::kEmbeddingStream));
    TransformSpec spec;
    spec.scale_factor = result.cells[cell].coords[0];
    spec.shift_factor = result.cells[cell].coords[1];
    spec.seed = split_seed(ts, detail::kTransformStream);
    const EmbeddingMatrix t = apply_spec(e, spec);
    return std::vector<double>{scale_error(radius(e), radius(t)), translation_error(e, t).xi_tr};
  });
  return result;
}

/// Stability error between a random uniform embedding and its noise walk,
/// over a grid of shapes and noise factors.
inline SweepResult sweep_noise_stability(std::span<const double> n_grid,
                                         std::span<const double> d_grid,
                                         std::span<const double> noise_grid, int trials,
                                         std::uint64_t seed) {
  detail::require_nonempty(n_grid, "n");
  detail::require_nonempty(d_grid, "d");
  detail::require_nonempty(noise_grid, "noise");
  detail::require_trials(trials);
  for (double v : n_grid)
    if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, "n grid needs positive integers");
  for (double v : d_grid)
    if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, "d grid needs positive integers");

  SweepResult result;
  result.name = "noise-stability";
  result.axes = {"n", "d", "noise"};
  result.metrics = {"xi_st"};
  result.trials = trials;
  result.seed = seed;
  for (double n : n_grid)
    for (double d : d_grid)
      for (double nf : noise_grid) result.cells.push_back({{n, d, nf}, {}});

  detail::run_trials(result, [&](std::size_t cell, std::size_t trial) {
    const auto& c = result.cells[cell].coords;
    const std::uint64_t ts = detail::trial_seed(seed, trial);
    const EmbeddingMatrix e = random_embedding(static_cast<Eigen::Index>(c[0]),
                                               static_cast<Eigen::Index>(c[1]),
                                               split_seed(ts, detail::kEmbeddingStream));
    const EmbeddingMatrix noisy = apply_noise_walk(e, c[2], split_seed(ts, detail::kTransformStream));
    return std::vector<double>{align_pair(e, noisy).report.xi_st};
  });
  return result;
}

enum class TransformKind { Scale, Shift, Rotation };

inline const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Scale: return "scale";
    case TransformKind::Shift: return "shift";
    case TransformKind::Rotation: return "rotation";
  }
  return "unknown";
}

/// Rotation spec whose every elementary block turns by `angle`, without
/// reflection.
inline RotationSpec uniform_rotation(Eigen::Index d, double angle) {
  return RotationSpec{std::vector<double>(canonical_angle_count(d, false), angle), false};
}

/// One structure-preserving transform combined with a noise walk. Each cell
/// reports the stability error and the transform's own error (xi_sc,
/// xi_tr or xi_rot). The rotation factor is the angle of every elementary
/// block. Trials share embeddings and noise streams across cells.
inline SweepResult sweep_transform_vs_noise(TransformKind kind, std::span<const double> factor_grid,
                                            std::span<const double> noise_grid, int trials,
                                            std::uint64_t seed, const ShapeRange& shapes) {
  detail::require_nonempty(factor_grid, "factor");
  detail::require_nonempty(noise_grid, "noise");
  detail::require_trials(trials);
  shapes.validate();

  SweepResult result;
  result.name = "transform-noise";
  result.axes = {"factor", "noise"};
  const char* own = kind == TransformKind::Scale   ? "xi_sc"
                    : kind == TransformKind::Shift ? "xi_tr"
                                                   : "xi_rot";
  result.metrics = {"xi_st", own};
  result.trials = trials;
  result.seed = seed;
  for (double f : factor_grid)
    for (double nf : noise_grid) result.cells.push_back({{f, nf}, {}});

  detail::run_trials(result, [&](std::size_t cell, std::size_t trial) {
    const auto& c = result.cells[cell].coords;
    const std::uint64_t ts = detail::trial_seed(seed, trial);
    const auto shape = detail::sample_shape(shapes, ts);
    const EmbeddingMatrix e =
        random_embedding(shape.n, shape.d, split_seed(ts, detail::kEmbeddingStream));
    TransformSpec spec;
    spec.noise_factor = c[1];
    spec.seed = split_seed(ts, detail::kTransformStream);
    switch (kind) {
      case TransformKind::Scale: spec.scale_factor = c[0]; break;
      case TransformKind::Shift: spec.shift_factor = c[0]; break;
      case TransformKind::Rotation: spec.rotation = uniform_rotation(shape.d, c[0]); break;
    }
    const AlignmentReport rep = align_pair(e, apply_spec(e, spec)).report;
    const double own_error = kind == TransformKind::Scale   ? rep.xi_sc
                             : kind == TransformKind::Shift ? rep.xi_tr
                                                            : rep.xi_rot;
    return std::vector<double>{rep.xi_st, own_error};
  });
  return result;
}

// ---------------------------------------------------------------------------
// Classification on synthetic clusters.

enum class ClassifierKind { NearestCentroid, Linear };

inline const char* to_string(ClassifierKind kind) {
  return kind == ClassifierKind::NearestCentroid ? "nearest-centroid" : "linear";
}

/// Assigns each row to the class whose training mean is closest.
class NearestCentroidClassifier {
 public:
  NearestCentroidClassifier(const Matrix& x, std::span<const int> labels, int classes)
      : centroids_(Matrix::Zero(classes, x.cols())) {
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      centroids_.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < classes; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) centroids_.row(c) /= counts[static_cast<std::size_t>(c)];
    }
  }

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    Eigen::Index best = 0;
    (centroids_.rowwise() - row).rowwise().squaredNorm().minCoeff(&best);
    return static_cast<int>(best);
  }

 private:
  Matrix centroids_;
};

/// One-vs-rest least squares on +-1 targets with a bias column; predicts the
/// class with the largest score.
class LinearClassifier {
 public:
  LinearClassifier(const Matrix& x, std::span<const int> labels, int classes) {
    Matrix aug(x.rows(), x.cols() + 1);
    aug << x, Eigen::VectorXd::Ones(x.rows());
    Matrix y = Matrix::Constant(x.rows(), classes, -1.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    weights_ = aug.colPivHouseholderQr().solve(y);
  }

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    const Eigen::Index d = row.size();
    Eigen::RowVectorXd scores = row * weights_.topRows(d) + weights_.row(d);
    Eigen::Index best = 0;
    scores.maxCoeff(&best);
    return static_cast<int>(best);
  }

 private:
  Matrix weights_;
};

/// Trains on (train, labels) and returns the fraction of test rows whose
/// predicted class matches the label of the same row.
inline double classification_accuracy(ClassifierKind kind, const EmbeddingMatrix& train,
                                      const EmbeddingMatrix& test, std::span<const int> labels,
                                      int classes) {
  require_same_shape(train, test);
  if (labels.size() != static_cast<std::size_t>(train.n())) {
    throw Error(ErrorKind::ShapeMismatch, "label count does not match row count");
  }
  auto score = [&](const auto& model) {
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < test.n(); ++i) {
      if (model.predict(test.row(i)) == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.n());
  };
  if (kind == ClassifierKind::NearestCentroid) {
    return score(NearestCentroidClassifier(train.data(), labels, classes));
  }
  return score(LinearClassifier(train.data(), labels, classes));
}

struct ClusterDemoConfig {
  int k = 4;
  Eigen::Index n_per_cluster = 100;
  Eigen::Index d = 2;
  double cluster_separation = 5.0;  // adjacent centre spacing / within-cluster radius
  double drift_noise_factor = 0.25;
  std::vector<double> rotation_factors{0.0, std::numbers::pi / 4, std::numbers::pi / 2,
                                       3 * std::numbers::pi / 4, std::numbers::pi};
  std::vector<double> translation_factors{0.0, 0.5, 1.0, 2.0};
  ClassifierKind classifier = ClassifierKind::NearestCentroid;
  int trials = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "cluster demo needs k >= 2");
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "cluster demo needs d >= 2");
    if (n_per_cluster < 1) throw Error(ErrorKind::InvalidArgument, "cluster demo needs n_per_cluster >= 1");
    if (!(cluster_separation > 0.0)) throw Error(ErrorKind::InvalidArgument, "cluster separation must be positive");
    if (!(drift_noise_factor >= 0.0)) throw Error(ErrorKind::InvalidArgument, "drift noise factor must be nonnegative");
    if (rotation_factors.empty() || translation_factors.empty()) {
      throw Error(ErrorKind::InvalidArgument, "misalignment grids must be nonempty");
    }
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
  }
};

struct ClusterData {
  EmbeddingMatrix embedding;
  std::vector<int> labels;
};

/// k isotropic Gaussian clusters with unit RMS within-cluster radius. The
/// centres sit evenly on a circle in the first two coordinates, adjacent
/// centres `separation` apart.
inline ClusterData make_clusters(int k, Eigen::Index n_per_cluster, Eigen::Index d,
                                 double separation, std::uint64_t seed) {
  Rng rng(seed);
  const double ring = separation / (2.0 * std::sin(std::numbers::pi / k));
  const double sigma = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix x(k * n_per_cluster, d);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(x.rows()));
  for (int c = 0; c < k; ++c) {
    const double phi = 2.0 * std::numbers::pi * c / k;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    mean(0) = ring * std::cos(phi);
    mean(1) = ring * std::sin(phi);
    for (Eigen::Index i = 0; i < n_per_cluster; ++i) {
      const Eigen::Index row = c * n_per_cluster + i;
      for (Eigen::Index j = 0; j < d; ++j) x(row, j) = mean(j) + sigma * rng.normal();
      labels.push_back(c);
    }
  }
  return {EmbeddingMatrix(std::move(x)), std::move(labels)};
}

struct DemoRow {
  double rotation_factor = 0.0;
  double translation_factor = 0.0;
  double accuracy_misaligned = 0.0;
  double accuracy_aligned = 0.0;
};

/// Next-timestep classification with and without alignment.
///
/// Per trial: clusters at t, a mild noise walk gives t+1, and every grid
/// cell misaligns t+1 by a rotation (all elementary angles equal to the
/// rotation factor) and a shift (translation factor, in radii). The
/// classifier trains on t with the cluster labels and is scored on the
/// misaligned t+1, and again after align_pair, training on the aligned t
/// and scoring on the aligned t+1. Accuracies are averaged over trials.
///
/// Throws DegenerateClusters when the classifier cannot beat chance by 0.1
/// on its own training data.
inline std::vector<DemoRow> inference_demo(const ClusterDemoConfig& cfg) {
  cfg.validate();
  const double chance = 1.0 / cfg.k;
  const std::size_t cells = cfg.rotation_factors.size() * cfg.translation_factors.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);

  struct Outcome {
    double misaligned = 0.0;
    double aligned = 0.0;
    double training = 1.0;
  };
  std::vector<Outcome> outcomes(cells * trials);

  parallel_for(cells * trials, [&](std::size_t idx) {
    const std::size_t cell = idx / trials;
    const std::size_t trial = idx % trials;
    const std::uint64_t ts = detail::trial_seed(cfg.seed, trial);
    const ClusterData data = make_clusters(cfg.k, cfg.n_per_cluster, cfg.d, cfg.cluster_separation,
                                           split_seed(ts, detail::kEmbeddingStream));
    const EmbeddingMatrix next = apply_noise_walk(data.embedding, cfg.drift_noise_factor,
                                                  split_seed(ts, detail::kTransformStream));

    TransformSpec spec;
    spec.rotation = uniform_rotation(cfg.d, cfg.rotation_factors[cell / cfg.translation_factors.size()]);
    spec.shift_factor = cfg.translation_factors[cell % cfg.translation_factors.size()];
    spec.seed = split_seed(split_seed(ts, detail::kShapeStream), cell);
    const EmbeddingMatrix misaligned = apply_spec(next, spec);
    const AlignedPair aligned = align_pair(data.embedding, misaligned);

    Outcome& out = outcomes[idx];
    out.misaligned = classification_accuracy(cfg.classifier, data.embedding, misaligned, data.labels, cfg.k);
    out.aligned = classification_accuracy(cfg.classifier, aligned.aligned_s, aligned.aligned_t,
                                          data.labels, cfg.k);
    if (cell == 0) {
      out.training = classification_accuracy(cfg.classifier, data.embedding, data.embedding,
                                             data.labels, cfg.k);
    }
  });

  for (std::size_t trial = 0; trial < trials; ++trial) {
    if (outcomes[trial].training < chance + 0.1) {
      throw Error(ErrorKind::DegenerateClusters,
                  "clusters are not separable: training accuracy " +
                      std::to_string(outcomes[trial].training) + " vs chance " + std::to_string(chance));
    }
  }

  std::vector<DemoRow> rows;
  rows.reserve(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    DemoRow row;
    row.rotation_factor = cfg.rotation_factors[cell / cfg.translation_factors.size()];
    row.translation_factor = cfg.translation_factors[cell % cfg.translation_factors.size()];
    for (std::size_t trial = 0; trial < trials; ++trial) {
      row.accuracy_misaligned += outcomes[cell * trials + trial].misaligned;
      row.accuracy_aligned += outcomes[cell * trials + trial].aligned;
    }
    row.accuracy_misaligned /= static_cast<double>(trials);
    row.accuracy_aligned /= static_cast<double>(trials);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace alignkit
