#include <gtest/gtest.h>

#include <cmath>

#include "alignkit/io.hpp"
#include "cli_runner.hpp"

using namespace alignkit;
using clirun::read_file;
using clirun::Scratch;

namespace {

AlignmentReport report_of(const std::string& text) { return parse_report(text); }

}  // namespace

TEST(Cli, MeasureIdenticalFiles) {
  Scratch s("measure");
  ASSERT_EQ(s.run("synth --n 50 --d 3 --seed 1 --out-s " + s.str("a") + " --out-t " + s.str("b")), 0);
  EXPECT_EQ(read_file(s.path("a")), read_file(s.path("b")));
  ASSERT_EQ(s.run("measure " + s.str("a") + " " + s.str("a")), 0);
  const auto r = report_of(s.out());
  EXPECT_EQ(r.xi_tr, 0.0);
  EXPECT_LE(r.xi_rot, 1e-7);
  EXPECT_EQ(r.xi_sc, 0.0);
  EXPECT_LE(r.xi_st, 1e-12);
  EXPECT_EQ(r.n, 50);
  EXPECT_EQ(r.d, 3);
}

TEST(Cli, SynthThenMeasureClosedForms) {
  Scratch s("closed");
  ASSERT_EQ(s.run("synth --n 200 --d 4 --seed 2 --shift 2 --out-s " + s.str("a") + " --out-t " + s.str("b")), 0);
  ASSERT_EQ(s.run("measure " + s.str("a") + " " + s.str("b") + " -o " + s.str("r.json")), 0);
  EXPECT_TRUE(s.out().empty());
  EXPECT_NEAR(report_of(read_file(s.path("r.json"))).xi_tr, 0.5, 1e-6);

  ASSERT_EQ(s.run("synth --n 200 --d 4 --seed 2 --scale 3 --out-s " + s.str("a") + " --out-t " + s.str("b")), 0);
  ASSERT_EQ(s.run("measure " + s.str("a") + " " + s.str("b")), 0);
  EXPECT_NEAR(report_of(s.out()).xi_sc, 0.5, 1e-9);

  ASSERT_EQ(s.run("synth --n 200 --d 2 --seed 2 --rotate pi/3 --out-s " + s.str("a") + " --out-t " + s.str("b")), 0);
  ASSERT_EQ(s.run("measure " + s.str("a") + " " + s.str("b")), 0);
  EXPECT_NEAR(report_of(s.out()).xi_rot, std::sin(std::numbers::pi / 6), 1e-6);
}

TEST(Cli, AlignIsIdempotent) {
  Scratch s("align");
  ASSERT_EQ(s.run("synth --n 120 --d 5 --seed 3 --rotate 0.4,1.9 --shift 1 --scale 2 --noise 0.5 --out-s " +
                  s.str("a") + " --out-t " + s.str("b")),
            0);
  ASSERT_EQ(s.run("measure " + s.str("a") + " " + s.str("b")), 0);
  const auto original = report_of(s.out());
  ASSERT_EQ(s.run("align " + s.str("a") + " " + s.str("b") + " --out-s " + s.str("as") + " --out-t " + s.str("at")),
            0);
  const auto aligned_report = report_of(s.out());
  EXPECT_NEAR(aligned_report.xi_st, original.xi_st, 1e-9);

  const auto as = read_matrix(s.path("as"));
  EXPECT_LE(centroid(as).norm(), 1e-9);
  EXPECT_NEAR(radius(as), 1.0, 1e-9);

  ASSERT_EQ(s.run("measure " + s.str("as") + " " + s.str("at")), 0);
  const auto again = report_of(s.out());
  EXPECT_LE(again.xi_tr, 1e-6);
  EXPECT_LE(again.xi_rot, 1e-6);
  EXPECT_LE(again.xi_sc, 1e-6);
}

TEST(Cli, AlignSequence) {
  Scratch s("seq");
  ASSERT_EQ(s.run("synth --n 40 --d 3 --seed 4 --rotate 1 --out-s " + s.str("e1") + " --out-t " + s.str("e2")), 0);
  ASSERT_EQ(s.run("synth --n 40 --d 3 --seed 5 --out-s " + s.str("x") + " --out-t " + s.str("e3")), 0);
  ASSERT_EQ(s.run("align-seq " + s.str("e1") + " " + s.str("e2") + " " + s.str("e3") + " --out-dir " +
                  s.str("out") + " -o " + s.str("reports.json")),
            0);
  const auto reports = nlohmann::json::parse(read_file(s.path("reports.json")));
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_LE(reports[0]["xi_st"].get<double>(), 1e-9);
  for (const char* name : {"aligned_001.txt", "aligned_002.txt", "aligned_003.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(s.path("out") / name)) << name;
  }
  const auto a1 = read_matrix(s.path("out") / "aligned_001.txt");
  const auto a2 = read_matrix(s.path("out") / "aligned_002.txt");
  EXPECT_LE((a1.data() - a2.data()).norm(), 1e-7);

  s.write("bad", "1 2\n3 4\n");
  EXPECT_EQ(s.run("align-seq " + s.str("e1") + " " + s.str("e2") + " " + s.str("bad") + " --out-dir " + s.str("o2")), 3);
  EXPECT_NE(s.err().find("timestep 3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  Scratch s("codes");
  s.write("a", "0 0\n1 0\n2 1\n");
  s.write("b", "0 0\n1 0\n");
  s.write("p", "1 1\n1 1\n2 x\n");
  s.write("z", "1 1\n1 1\n1 1\n");

  EXPECT_EQ(s.run("measure " + s.str("a") + " " + s.str("p")), 2);
  EXPECT_NE(s.err().find("line 3, column 3"), std::string::npos);
  EXPECT_EQ(s.run("measure " + s.str("a") + " " + s.str("missing")), 2);

  EXPECT_EQ(s.run("measure " + s.str("a") + " " + s.str("b")), 3);
  EXPECT_NE(s.err().find("3x2"), std::string::npos);
  EXPECT_NE(s.err().find("2x2"), std::string::npos);
  EXPECT_TRUE(s.out().empty());

  EXPECT_EQ(s.run("measure " + s.str("a") + " " + s.str("z")), 4);

  EXPECT_EQ(s.run("synth --n 10 --d 3 --rotate 1,2 --out-s " + s.str("x") + " --out-t " + s.str("y")), 5);
  EXPECT_EQ(s.run("synth --n 10 --d 3 --scale -1 --out-s " + s.str("x") + " --out-t " + s.str("y")), 5);
  EXPECT_EQ(s.run("sweep bogus"), 5);
  EXPECT_EQ(s.run("sweep rotation --theta 0:zz:3"), 5);
  EXPECT_EQ(s.run("measure"), 5);
  EXPECT_EQ(s.run("demo --separation 0.001 --rot-factors 0 --trans-factors 0"), 6);

  const auto err = s.err();
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST(Cli, SweepOutputs) {
  Scratch s("sweep");
  ASSERT_EQ(s.run("sweep rotation --d 2 --theta 0,pi --reflect-options 0"), 0);
  EXPECT_EQ(s.out(),
            "reflect,theta_1,theta_2,xi_rot_mean,xi_rot_std,xi_rot_angles_mean,xi_rot_angles_std,trials\n"
            "0,0,,0,0,0,0,1\n"
            "0,3.1415926535897931,,1,0,1,0,1\n");

  ASSERT_EQ(s.run("sweep noise-stability --n 100 --dims 4 --noise 0,1 --trials 3 --seed 9"), 0);
  std::istringstream csv(s.out());
  std::string header, zero_row;
  std::getline(csv, header);
  std::getline(csv, zero_row);
  EXPECT_EQ(header, "n,d,noise,xi_st_mean,xi_st_std,trials");
  EXPECT_LE(std::stod(zero_row.substr(zero_row.find(',', zero_row.find(',', zero_row.find(',') + 1) + 1) + 1)), 1e-8);
}

TEST(Cli, Deterministic) {
  Scratch s("det");
  const std::string sweep = "sweep transform-noise --kind rotation --trials 3 --n-range 50,200 --d-range 2,6 --seed 5 -o ";
  ASSERT_EQ(s.run(sweep + s.str("one.csv")), 0);
  ASSERT_EQ(s.run(sweep + s.str("two.csv")), 0);
  EXPECT_EQ(read_file(s.path("one.csv")), read_file(s.path("two.csv")));

  const std::string demo = "demo --trials 2 --seed 3 -o ";
  ASSERT_EQ(s.run(demo + s.str("d1.csv")), 0);
  ASSERT_EQ(s.run(demo + s.str("d2.csv")), 0);
  EXPECT_EQ(read_file(s.path("d1.csv")), read_file(s.path("d2.csv")));
  EXPECT_EQ(read_file(s.path("d1.csv")).substr(0, 51), "rot_factor,trans_factor,acc_misaligned,acc_aligned\n");
}
