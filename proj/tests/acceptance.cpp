// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "alignkit/alignkit.hpp"
#include "cli_runner.hpp"

using namespace alignkit;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

OrthogonalTransform random_transform(Eigen::Index d, std::mt19937_64& gen) {
  const bool reflect = gen() % 2 == 1;
  std::uniform_real_distribution<double> u(-pi, pi);
  std::vector<double> angles(canonical_angle_count(d, reflect));
  for (auto& a : angles) a = u(gen);
  return make_rotation(d, angles, reflect, gen());
}

Outcome ac1_closed_forms() {
  double worst_sc = 0.0, worst_tr = 0.0, worst_rot = 0.0;
  const auto e = random_embedding(500, 6, 101);
  for (double s : {0.1, 0.5, 1.0, 2.0, 3.0, 10.0}) {
    const auto out = apply_scale(e, s);
    worst_sc = std::max(worst_sc, std::abs(scale_error(radius(e), radius(out)) - std::abs(1.0 - s) / (1.0 + s)));
  }
  for (double f : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const auto out = apply_shift(e, f, std::nullopt, 103);
    worst_tr = std::max(worst_tr, std::abs(translation_error(e, out).xi_tr - f / (f + 2.0)));
  }
  for (int k = 0; k < 50; ++k) {
    const double theta = 2.0 * pi * k / 49.0 - pi;
    const double angle[] = {theta};
    worst_rot = std::max(worst_rot, std::abs(rotation_error(make_rotation(2, angle, false)) -
                                             std::abs(std::sin(theta / 2.0))));
  }
  const bool pass = worst_sc <= 1e-9 && worst_tr <= 1e-9 && worst_rot <= 1e-9;
  return {pass, fmt("max |err| scale %.2e, translation %.2e, rotation %.2e (limit 1e-9)", worst_sc, worst_tr,
                    worst_rot)};
}

Outcome ac2_recovery() {
  std::mt19937_64 gen(202);
  double worst_st = 0.0, worst_rot = 0.0, worst_out = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = static_cast<Eigen::Index>(1 + gen() % 16);
    const auto n = static_cast<Eigen::Index>(2 * d + static_cast<Eigen::Index>(gen() % 300));
    const auto es = random_embedding(n, d, gen());
    const auto r0 = random_transform(d, gen);
    Rng rng(gen());
    const Vector v = rng.normal_matrix(d, 1).col(0) * 3.0;
    const double s = std::exp(std::uniform_real_distribution<double>(-2.0, 2.0)(gen));
    const EmbeddingMatrix et(((es.data() * r0.matrix()).rowwise() + v.transpose()) * s);
    const auto out = align_pair(es, et);
    worst_st = std::max(worst_st, out.report.xi_st);
    worst_rot = std::max(worst_rot, std::abs(out.report.xi_rot - rotation_error(r0)));
    worst_out = std::max(worst_out, (out.aligned_s.data() - out.aligned_t.data()).norm());
  }
  const bool pass = worst_st <= 1e-8 && worst_rot <= 1e-6 && worst_out <= 1e-6;
  return {pass, fmt("100 shapes: max xi_st %.2e (<=1e-8), max |xi_rot - xi_rot(R0)| %.2e (<=1e-6), "
                    "max output gap %.2e (<=1e-6)",
                    worst_st, worst_rot, worst_out)};
}

Outcome ac3_rotation_extremes() {
  const double pi_only[] = {pi};
  const double zero_only[] = {0.0};
  const auto d3 = sweep_rotation_error(3, pi_only, {true});
  const auto d4_pi = sweep_rotation_error(4, pi_only, {false});
  const auto d4_zero = sweep_rotation_error(4, zero_only, {false});
  const double a = d3.cells.at(0).stats[0].mean;
  const double b = d4_pi.cells.at(0).stats[0].mean;
  const double c = d4_zero.cells.at(0).stats[0].mean;
  const bool pass = std::abs(a - 1.0) <= 1e-12 && std::abs(b - 1.0) <= 1e-12 && std::abs(c) <= 1e-12;
  return {pass, fmt("d=3 reflect theta=pi: %.15g; d=4 (pi,pi): %.15g; d=4 (0,0): %.3g", a, b, c)};
}

Outcome ac4_shape_robustness() {
  std::vector<double> means;
  std::string cells;
  for (double n : {100.0, 500.0, 2000.0}) {
    std::vector<double> dims;
    for (double d : {4.0, 16.0, 32.0})
      if (n / d >= 20.0) dims.push_back(d);
    const double ns[] = {n};
    const double noise[] = {1.0};
    const auto r = sweep_noise_stability(ns, dims, noise, 20, 404);
    for (const auto& c : r.cells) {
      means.push_back(c.stats[0].mean);
      cells += fmt(" %gx%g=%.4f", c.coords[0], c.coords[1], c.stats[0].mean);
    }
  }
  const double spread = *std::max_element(means.begin(), means.end()) - *std::min_element(means.begin(), means.end());
  return {spread <= 0.05, fmt("spread %.4f (<=0.05);", spread) + cells};
}

Outcome ac5_plateau() {
  const double ns[] = {1000};
  const double ds[] = {16};
  const double noise[] = {8};
  const auto r = sweep_noise_stability(ns, ds, noise, 20, 505);
  const double m = r.cells.at(0).stats[0].mean;
  return {m >= 0.6 && m <= 0.8, fmt("mean xi_st %.4f (std %.4f) in [0.6, 0.8]", m, r.cells[0].stats[0].std)};
}

Outcome ac6_invariance() {
  std::mt19937_64 gen(606);
  const auto s = random_embedding(300, 8, 607);
  const auto t = apply_noise_walk(s, 1.0, 608);
  const double baseline = align_pair(s, t).report.xi_st;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    TransformSpec spec;
    const bool reflect = gen() % 2 == 1;
    std::uniform_real_distribution<double> u(-pi, pi);
    std::vector<double> angles(canonical_angle_count(8, reflect));
    for (auto& a : angles) a = u(gen);
    spec.rotation = RotationSpec{angles, reflect};
    spec.shift_factor = std::uniform_real_distribution<double>(0.0, 10.0)(gen);
    spec.scale_factor = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(gen));
    spec.seed = gen();
    worst = std::max(worst, std::abs(align_pair(s, apply_spec(t, spec)).report.xi_st - baseline));
  }
  return {worst <= 1e-6, fmt("baseline xi_st %.6f, max deviation over 50 decorations %.2e (<=1e-6)", baseline, worst)};
}

Outcome ac7_inference() {
  Outcome o;
  for (Eigen::Index d : {2, 8}) {
    ClusterDemoConfig cfg;
    cfg.k = 4;
    cfg.d = d;
    cfg.cluster_separation = 5.0;
    cfg.drift_noise_factor = 0.25;
    cfg.seed = 707;
    const auto rows = inference_demo(cfg);
    double worst_cell = 1.0;
    double largest_gain = 0.0;
    const double max_rot = *std::max_element(cfg.rotation_factors.begin(), cfg.rotation_factors.end());
    const double max_tr = *std::max_element(cfg.translation_factors.begin(), cfg.translation_factors.end());
    for (const auto& r : rows) {
      worst_cell = std::min(worst_cell, r.accuracy_aligned - r.accuracy_misaligned);
      if (r.rotation_factor == max_rot && r.translation_factor == max_tr) {
        largest_gain = r.accuracy_aligned - r.accuracy_misaligned;
      }
    }
    o.pass = o.pass && worst_cell >= -0.02 && largest_gain >= 0.3;
    o.detail += fmt("d=%ld: min cell gain %.3f (>=-0.02), gain at (pi,2) %.3f (>=0.3); ", static_cast<long>(d),
                    worst_cell, largest_gain);
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome ac8_determinism() {
  clirun::Scratch run1("acc1");
  clirun::Scratch run2("acc2");
  const std::vector<std::string> files = {"s.txt", "t.txt", "report.json", "as.txt", "at.txt", "u.txt", "v.txt",
                                          "seq.json", "rot.csv", "ss.csv", "ns.csv", "tn.csv", "demo.csv"};
  int failures = 0;
  std::size_t commands = 0;
  for (auto* s : {&run1, &run2}) {
    const std::vector<std::string> cmds = {
        "synth --n 300 --d 5 --seed 8 --rotate 0.5,2 --shift 1 --scale 2 --noise 1 --out-s " + s->str("s.txt") +
            " --out-t " + s->str("t.txt"),
        "measure " + s->str("s.txt") + " " + s->str("t.txt") + " -o " + s->str("report.json"),
        "align " + s->str("s.txt") + " " + s->str("t.txt") + " --out-s " + s->str("as.txt") + " --out-t " +
            s->str("at.txt"),
        "synth --n 300 --d 5 --seed 9 --noise 0.5 --out-s " + s->str("u.txt") + " --out-t " + s->str("v.txt"),
        "align-seq " + s->str("s.txt") + " " + s->str("t.txt") + " " + s->str("v.txt") + " --out-dir " +
            s->str("seq") + " -o " + s->str("seq.json"),
        "sweep rotation --d 4 --seed 8 -o " + s->str("rot.csv"),
        "sweep scale-shift --trials 4 --n-range 10,500 --seed 8 -o " + s->str("ss.csv"),
        "sweep noise-stability --n 100,400 --dims 4,8 --noise 0,1,4 --trials 4 --seed 8 -o " + s->str("ns.csv"),
        "sweep transform-noise --kind shift --trials 4 --seed 8 -o " + s->str("tn.csv"),
        "demo --d 3 --trials 2 --seed 8 -o " + s->str("demo.csv"),
    };
    commands = cmds.size();
    for (const auto& c : cmds)
      if (s->run(c) != 0) ++failures;
  }
  int differing = 0;
  for (const auto& f : files)
    if (clirun::read_file(run1.path(f)) != clirun::read_file(run2.path(f)) || clirun::read_file(run1.path(f)).empty())
      ++differing;
  for (const char* f : {"aligned_001.txt", "aligned_002.txt", "aligned_003.txt"})
    if (clirun::read_file(run1.path("seq") / f) != clirun::read_file(run2.path("seq") / f)) ++differing;
  return {failures == 0 && differing == 0,
          fmt("%zu commands x2: %d nonzero exits, %d of %zu outputs differ or are empty", commands, failures,
              differing, files.size() + 3)};
}

Outcome ac9_bounds() {
  std::mt19937_64 gen(909);
  int out_of_range = 0;
  int pairs = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + gen() % 12);
    const auto n = static_cast<Eigen::Index>(2 + gen() % 60);
    Rng rng(gen());
    auto cloud = [&](int kind) -> Matrix {
      switch (kind) {
        case 0: return rng.uniform_matrix(n, d, -1.0, 1.0);
        case 1:  // tiny spread around a far offset
          return (rng.normal_matrix(n, d) * 1e-7).rowwise() + (rng.normal_matrix(1, d) * 1e3).row(0);
        case 2: {  // collinear
          Matrix m = rng.normal_matrix(n, 1) * rng.normal_matrix(1, d);
          return m;
        }
        case 3: {  // a single outlier among duplicates
          Matrix m = Matrix::Ones(n, d);
          m.row(0) += rng.normal_matrix(1, d).row(0) * 1e-6;
          return m;
        }
        default: return rng.normal_matrix(n, d) * std::exp(rng.uniform(-10.0, 10.0));
      }
    };
    const EmbeddingMatrix s(cloud(static_cast<int>(gen() % 5)));
    const EmbeddingMatrix t(cloud(static_cast<int>(gen() % 5)));
    if (!(radius(s) > 0.0) || !(radius(t) > 0.0)) continue;
    ++pairs;
    const auto r = align_pair(s, t).report;
    for (double v : {r.xi_tr, r.xi_rot, r.xi_sc, r.xi_st, stability_error(s, t)})
      if (!(v >= 0.0 && v <= 1.0)) ++out_of_range;
  }

  int iff_failures = 0;
  for (int k = 0; k < 200; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + gen() % 8);
    const auto n = static_cast<Eigen::Index>(1 + gen() % 30);
    Rng rng(gen());
    const EmbeddingMatrix s(rng.normal_matrix(n, d));
    if (stability_error(s, s) != 0.0) ++iff_failures;
    Matrix m = s.data();
    m(static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(n)),
      static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(d))) += std::ldexp(1.0, -30);
    if (!(stability_error(s, EmbeddingMatrix(m)) > 0.0)) ++iff_failures;
  }
  return {out_of_range == 0 && iff_failures == 0,
          fmt("%d pairs: %d values outside [0,1]; zero-iff-equal: %d failures over 200 constructed cases", pairs,
              out_of_range, iff_failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 closed-form metric checks", ac1_closed_forms},
      {"AC2 Procrustes recovery", ac2_recovery},
      {"AC3 rotation sweep extremes", ac3_rotation_extremes},
      {"AC4 stability shape robustness", ac4_shape_robustness},
      {"AC5 stability plateau", ac5_plateau},
      {"AC6 stability invariance under misalignment", ac6_invariance},
      {"AC7 inference improvement", ac7_inference},
      {"AC8 CLI determinism", ac8_determinism},
      {"AC9 bound suite", ac9_bounds},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
