// alignkit command-line front end.
//
//   alignkit measure S T [-o report.json]
//   alignkit align S T --out-s A --out-t B [-o report.json]
//   alignkit align-seq F1 F2 ... --out-dir DIR [-o reports.json]
//   alignkit synth --n N --d D --seed K [--scale S] [--shift F] [--rotate LIST]
//                  [--reflect] [--noise NF] --out-s A --out-t B
//   alignkit sweep rotation|scale-shift|noise-stability|transform-noise [grids] [-o out.csv]
//   alignkit demo [config flags] [-o out.csv]
//
// Exit codes: 0 success, 1 internal error, 2 parse or I/O error, 3 shape
// mismatch, 4 degenerate radius, 5 invalid spec or arguments, 6 degenerate
// clusters.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alignkit/alignkit.hpp"

namespace fs = std::filesystem;
using namespace alignkit;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Io: return 2;
    case ErrorKind::ShapeMismatch: return 3;
    case ErrorKind::NonPositiveRadius: return 4;
    case ErrorKind::InvalidArgument:
    case ErrorKind::AngleCountMismatch: return 5;
    case ErrorKind::DegenerateClusters: return 6;
    case ErrorKind::NotCentered:
    case ErrorKind::NotOrthogonal: return 1;
  }
  return 1;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (...) {
    throw Error(ErrorKind::InvalidArgument, "invalid number '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, "invalid number '" + text + "'");
  }
  return v;
}

// A number, or a multiple of pi: "pi", "-pi", "0.5pi", "pi/4", "3pi/4".
double parse_scalar(const std::string& raw) {
  const std::string text = trim(raw);
  const auto p = text.find("pi");
  if (p == std::string::npos) return parse_number(text);
  const std::string coef = text.substr(0, p);
  std::string rest = text.substr(p + 2);
  double value = std::numbers::pi;
  if (coef == "-") {
    value = -value;
  } else if (!coef.empty()) {
    value *= parse_number(coef);
  }
  if (!rest.empty()) {
    if (rest.front() != '/') throw Error(ErrorKind::InvalidArgument, "invalid angle '" + text + "'");
    const double div = parse_number(rest.substr(1));
    if (div == 0.0) throw Error(ErrorKind::InvalidArgument, "division by zero in '" + text + "'");
    value /= div;
  }
  return value;
}

// Comma-separated scalars, or "start:stop:count" for an evenly spaced grid.
std::vector<double> parse_grid(const std::string& text) {
  if (trim(text).empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "range grid must be start:stop:count");
    const double a = parse_scalar(parts[0]);
    const double b = parse_scalar(parts[1]);
    const double count = parse_number(trim(parts[2]));
    if (count < 1 || count != std::floor(count)) {
      throw Error(ErrorKind::InvalidArgument, "range grid count must be a positive integer");
    }
    const auto k = static_cast<std::size_t>(count);
    std::vector<double> grid(k);
    for (std::size_t i = 0; i < k; ++i) {
      grid[i] = k == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
    }
    return grid;
  }
  std::vector<double> grid;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) grid.push_back(parse_scalar(item));
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  return grid;
}

ShapeRange parse_shape_range(const std::string& n_range, const std::string& d_range) {
  auto pair = [](const std::string& text, const char* what) {
    const auto g = parse_grid(text);
    if (g.size() != 2 || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1])) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " range must be 'min,max' integers");
    }
    return std::pair{static_cast<Eigen::Index>(g[0]), static_cast<Eigen::Index>(g[1])};
  };
  ShapeRange r;
  std::tie(r.n_min, r.n_max) = pair(n_range, "n");
  std::tie(r.d_min, r.d_max) = pair(d_range, "d");
  r.validate();
  return r;
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    write_text_file(out_path, payload);
  }
}

struct Options {
  // measure / align
  std::string file_s, file_t, out_s, out_t, out;
  // align-seq
  std::vector<std::string> files;
  std::string out_dir;
  // synth
  long n = 100, d = 4;
  std::uint64_t seed = 0;
  double scale = 1.0, shift = 0.0, noise = 0.0;
  std::optional<std::string> rotate;
  bool reflect = false;
  // sweep
  std::string sweep;
  long sweep_d = 3;
  std::string theta = "0:pi:13", reflect_options = "0,1";
  std::string scale_grid = "0.1,0.25,0.5,1,2,4,10", shift_grid = "0,0.5,1,2,5";
  std::string n_grid = "100,500,2000", dims_grid = "4,16,32", noise_grid;
  std::string kind = "rotation";
  std::optional<std::string> factors;
  std::string n_range, d_range;
  int trials = 20;
  // demo
  int k = 4;
  long n_per_cluster = 100, demo_d = 2;
  double separation = 5.0, drift = 0.25;
  std::string rot_factors = "0,pi/4,pi/2,3pi/4,pi", trans_factors = "0,0.5,1,2";
  std::string classifier = "nearest-centroid";
  int demo_trials = 5;
};

int cmd_measure(const Options& o) {
  const auto s = read_matrix(o.file_s);
  const auto t = read_matrix(o.file_t);
  const auto pair = align_pair(s, t);
  emit(o.out, report_to_json(pair.report) + "\n");
  return 0;
}

int cmd_align(const Options& o) {
  const auto s = read_matrix(o.file_s);
  const auto t = read_matrix(o.file_t);
  const auto pair = align_pair(s, t);
  write_matrix(fs::path(o.out_s), pair.aligned_s);
  write_matrix(fs::path(o.out_t), pair.aligned_t);
  emit(o.out, report_to_json(pair.report) + "\n");
  return 0;
}

int cmd_align_seq(const Options& o) {
  std::vector<EmbeddingMatrix> snapshots;
  snapshots.reserve(o.files.size());
  for (std::size_t i = 0; i < o.files.size(); ++i) {
    try {
      snapshots.push_back(read_matrix(o.files[i]));
    } catch (const Error& e) {
      throw Error::at_timestep(e, i + 1);
    }
  }
  const auto seq = align_sequence(snapshots);
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + o.out_dir + "': " + ec.message());
  for (std::size_t i = 0; i < seq.aligned.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "aligned_%03zu.txt", i + 1);
    write_matrix(fs::path(o.out_dir) / name, seq.aligned[i]);
  }
  emit(o.out, reports_to_json(seq.reports));
  return 0;
}

int cmd_synth(const Options& o) {
  if (o.n < 1 || o.d < 1) throw Error(ErrorKind::InvalidArgument, "--n and --d must be positive");
  TransformSpec spec;
  spec.scale_factor = o.scale;
  spec.shift_factor = o.shift;
  spec.noise_factor = o.noise;
  spec.seed = split_seed(o.seed, 1);
  if (o.rotate || o.reflect) {
    RotationSpec rot;
    rot.reflect = o.reflect;
    if (o.rotate && !trim(*o.rotate).empty()) rot.angles = parse_grid(*o.rotate);
    spec.rotation = rot;
  }
  spec.validate(o.d);
  const auto base = random_embedding(o.n, o.d, split_seed(o.seed, 0));
  const auto transformed = apply_spec(base, spec);
  write_matrix(fs::path(o.out_s), base);
  write_matrix(fs::path(o.out_t), transformed);
  return 0;
}

int cmd_sweep(const Options& o) {
  SweepResult result;
  if (o.sweep == "rotation") {
    if (o.sweep_d < 1) throw Error(ErrorKind::InvalidArgument, "--d must be positive");
    const auto thetas = parse_grid(o.theta);
    std::vector<bool> flags;
    for (double v : parse_grid(o.reflect_options)) {
      if (v != 0.0 && v != 1.0) throw Error(ErrorKind::InvalidArgument, "--reflect-options takes 0 and/or 1");
      flags.push_back(v != 0.0);
    }
    result = sweep_rotation_error(o.sweep_d, thetas, flags, o.seed);
  } else if (o.sweep == "scale-shift") {
    const auto shapes = parse_shape_range(o.n_range.empty() ? "10,10000" : o.n_range,
                                          o.d_range.empty() ? "2,32" : o.d_range);
    result = sweep_scale_translation(parse_grid(o.scale_grid), parse_grid(o.shift_grid), o.trials,
                                     o.seed, shapes);
  } else if (o.sweep == "noise-stability") {
    result = sweep_noise_stability(parse_grid(o.n_grid), parse_grid(o.dims_grid),
                                   parse_grid(o.noise_grid.empty() ? "0,0.25,0.5,1,2,4,8" : o.noise_grid),
                                   o.trials, o.seed);
  } else if (o.sweep == "transform-noise") {
    TransformKind kind;
    std::string default_factors;
    if (o.kind == "scale") {
      kind = TransformKind::Scale;
      default_factors = "0.25,0.5,1,2,4";
    } else if (o.kind == "shift") {
      kind = TransformKind::Shift;
      default_factors = "0,0.5,1,2,4";
    } else if (o.kind == "rotation") {
      kind = TransformKind::Rotation;
      default_factors = "0:pi:5";
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown --kind '" + o.kind + "'");
    }
    const auto shapes = parse_shape_range(o.n_range.empty() ? "100,1000" : o.n_range,
                                          o.d_range.empty() ? "2,16" : o.d_range);
    result = sweep_transform_vs_noise(kind, parse_grid(o.factors.value_or(default_factors)),
                                      parse_grid(o.noise_grid.empty() ? "0,0.5,1,2" : o.noise_grid),
                                      o.trials, o.seed, shapes);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown sweep '" + o.sweep +
                                                "' (expected rotation, scale-shift, noise-stability or "
                                                "transform-noise)");
  }
  std::ostringstream os;
  write_sweep_csv(os, result);
  emit(o.out, os.str());
  return 0;
}

int cmd_demo(const Options& o) {
  ClusterDemoConfig cfg;
  cfg.k = o.k;
  cfg.n_per_cluster = o.n_per_cluster;
  cfg.d = o.demo_d;
  cfg.cluster_separation = o.separation;
  cfg.drift_noise_factor = o.drift;
  cfg.rotation_factors = parse_grid(o.rot_factors);
  cfg.translation_factors = parse_grid(o.trans_factors);
  if (o.classifier == "nearest-centroid") {
    cfg.classifier = ClassifierKind::NearestCentroid;
  } else if (o.classifier == "linear") {
    cfg.classifier = ClassifierKind::Linear;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown classifier '" + o.classifier + "'");
  }
  cfg.trials = o.demo_trials;
  cfg.seed = o.seed;
  const auto rows = inference_demo(cfg);
  std::ostringstream os;
  write_demo_csv(os, rows);
  emit(o.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alignment and stability measurement for embedding matrices"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* measure = app.add_subcommand("measure", "Measure alignment and stability errors of a pair");
  measure->add_option("source", o.file_s, "Embedding at timestep t")->required();
  measure->add_option("target", o.file_t, "Embedding at timestep t+1")->required();
  measure->add_option("-o,--out", o.out, "Report path (default: stdout)");

  auto* align = app.add_subcommand("align", "Measure and write the aligned pair");
  align->add_option("source", o.file_s, "Embedding at timestep t")->required();
  align->add_option("target", o.file_t, "Embedding at timestep t+1")->required();
  align->add_option("--out-s", o.out_s, "Aligned source output")->required();
  align->add_option("--out-t", o.out_t, "Aligned target output")->required();
  align->add_option("-o,--out", o.out, "Report path (default: stdout)");

  auto* align_seq = app.add_subcommand("align-seq", "Align a sequence of embeddings into one frame");
  align_seq->add_option("files", o.files, "Embeddings in timestep order")->required()->expected(2, -1);
  align_seq->add_option("--out-dir", o.out_dir, "Directory for aligned_NNN.txt outputs")->required();
  align_seq->add_option("-o,--out", o.out, "Reports path, JSON array (default: stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a random embedding and a transformed copy");
  synth->add_option("--n", o.n, "Object count")->required();
  synth->add_option("--d", o.d, "Latent dimension")->required();
  synth->add_option("--seed", o.seed, "RNG seed");
  synth->add_option("--scale", o.scale, "Scaling factor (ratio of radii)");
  synth->add_option("--shift", o.shift, "Shifting factor (shift norm / radius)");
  synth->add_option("--rotate", o.rotate, "Elementary rotation angles, e.g. \"pi/2,0.3\"");
  synth->add_flag("--reflect", o.reflect, "Compose the rotation with a reflection");
  synth->add_option("--noise", o.noise, "Noise factor (units of 25 random-walk steps)");
  synth->add_option("--out-s", o.out_s, "Base matrix output")->required();
  synth->add_option("--out-t", o.out_t, "Transformed matrix output")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a synthetic parameter sweep and write CSV");
  sweep->add_option("name", o.sweep, "rotation | scale-shift | noise-stability | transform-noise")->required();
  sweep->add_option("--d", o.sweep_d, "Dimension (rotation sweep)");
  sweep->add_option("--theta", o.theta, "Angle grid (rotation sweep)");
  sweep->add_option("--reflect-options", o.reflect_options, "Reflection flags, subset of 0,1 (rotation sweep)");
  sweep->add_option("--scale", o.scale_grid, "Scaling factor grid (scale-shift)");
  sweep->add_option("--shift", o.shift_grid, "Shifting factor grid (scale-shift)");
  sweep->add_option("--n", o.n_grid, "Object count grid (noise-stability)");
  sweep->add_option("--dims", o.dims_grid, "Dimension grid (noise-stability)");
  sweep->add_option("--noise", o.noise_grid, "Noise factor grid");
  sweep->add_option("--kind", o.kind, "scale | shift | rotation (transform-noise)");
  sweep->add_option("--factors", o.factors, "Transform factor grid (transform-noise)");
  sweep->add_option("--n-range", o.n_range, "Random shape range for n, 'min,max'");
  sweep->add_option("--d-range", o.d_range, "Random shape range for d, 'min,max'");
  sweep->add_option("--trials", o.trials, "Trials per cell");
  sweep->add_option("--seed", o.seed, "Base seed");
  sweep->add_option("-o,--out", o.out, "CSV path (default: stdout)");

  auto* demo = app.add_subcommand("demo", "Next-timestep classification with forced misalignment");
  demo->add_option("--k", o.k, "Cluster count");
  demo->add_option("--n-per-cluster", o.n_per_cluster, "Objects per cluster");
  demo->add_option("--d", o.demo_d, "Latent dimension");
  demo->add_option("--separation", o.separation, "Adjacent cluster spacing in within-cluster radii");
  demo->add_option("--drift", o.drift, "Noise factor between timesteps");
  demo->add_option("--rot-factors", o.rot_factors, "Rotation factor grid (radians)");
  demo->add_option("--trans-factors", o.trans_factors, "Translation factor grid (radii)");
  demo->add_option("--classifier", o.classifier, "nearest-centroid | linear");
  demo->add_option("--trials", o.demo_trials, "Trials averaged per cell");
  demo->add_option("--seed", o.seed, "Base seed");
  demo->add_option("-o,--out", o.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 5;
  }

  try {
    if (*measure) return cmd_measure(o);
    if (*align) return cmd_align(o);
    if (*align_seq) return cmd_align_seq(o);
    if (*synth) return cmd_synth(o);
    if (*sweep) return cmd_sweep(o);
    if (*demo) return cmd_demo(o);
  } catch (const Error& e) {
    std::cerr << "alignkit: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "alignkit: internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
