#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "geophase/ga.hpp"
#include "geophase/io.hpp"

namespace fs = std::filesystem;
using namespace geophase;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geophase_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(GEOPHASE_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ChiCurveRegimes) {
  CliRun r = run("chi-curve --w0 0.6 -o " + (dir_ / "a").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("m=1"), std::string::npos);
  r = run("chi-curve --w0 2.5 -o " + (dir_ / "b").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("m=0"), std::string::npos);
  const std::string csv = slurp(dir_ / "a" / "chi_curve.csv");
  EXPECT_EQ(csv.rfind("# schema=1\n# command=chi-curve\n# config={", 0), 0u);
}

TEST_F(Cli, RerunFromEchoIsByteIdentical) {
  ASSERT_EQ(run("chi-curve --w0 0.9 --gamma 0.2 -o " + (dir_ / "a").string()).code, 0);
  const fs::path first = dir_ / "a" / "chi_curve.csv";
  ASSERT_EQ(run("chi-curve -c " + first.string() + " -o " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(slurp(first), slurp(dir_ / "b" / "chi_curve.csv"));
}

TEST_F(Cli, MissingConfigExitsTwoNamingPath) {
  const std::string missing = (dir_ / "nope.json").string();
  const CliRun r = run("chi-curve -c " + missing);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(Cli, InvalidConfigListsDiagnostics) {
  const fs::path cfg = write("bad.json", R"({"optics": {"w0_mm": -1, "shade": 2}})");
  const CliRun r = run("chi-curve -c " + cfg.string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("w0"), std::string::npos);
  EXPECT_NE(r.err.find("shade"), std::string::npos);
}

TEST_F(Cli, SingleCellDiagram) {
  const fs::path cfg = write("one.json", R"({"scan": {"w0_mm": [0.5], "gamma_rad": [0.0]}})");
  ASSERT_EQ(run("phase-diagram -c " + cfg.string() + " -o " + dir_.string()).code, 0);
  std::istringstream in(slurp(dir_ / "phase_diagram.csv"));
  int comments = 0, rows = 0;
  for (std::string line; std::getline(in, line);) (line[0] == '#' ? comments : rows)++;
  EXPECT_EQ(comments, 3);
  EXPECT_EQ(rows, 2);
}

TEST_F(Cli, DiagramIndependentOfThreads) {
  const fs::path cfg = write("grid.json", R"({"scan": {"w0_mm": {"min": 0.4, "max": 2.0, "count": 5},
    "gamma_rad": {"min": -1.0, "max": 1.0, "count": 4}, "alpha_points": 91}})");
  ASSERT_EQ(run("phase-diagram -c " + cfg.string() + " --threads 1 -o " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("phase-diagram -c " + cfg.string() + " --threads 3 -o " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "phase_diagram.csv"), slurp(dir_ / "b" / "phase_diagram.csv"));
}

TEST_F(Cli, FitIsDeterministicPerSeed) {
  SetupTemplate t;
  ImperfectionGenome g;
  g.set(0, 0.5, 2e-4);
  std::vector<ExperimentRecord> at;
  for (double w : {0.6, 1.2}) {
    for (int i = 0; i < 5; ++i) at.push_back({w, kPi / 8 * i, 0.0, 0.0, 1.0});
  }
  {
    std::ofstream out(dir_ / "data.csv");
    write_experiment_csv(out, simulate_records(g, at, t));
  }
  const fs::path cfg = write("ga.json", R"({"ga": {"population": 8, "generations": 3}})");
  const std::string base = "fit -c " + cfg.string() + " --data " + (dir_ / "data.csv").string() + " --seed 11 -o ";
  ASSERT_EQ(run(base + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run(base + (dir_ / "b").string()).code, 0);
  for (const char* f : {"fit_genome.json", "fit_history.csv"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir_ / "a" / "fit_genome.json").find("\"beta_rad\""), std::string::npos);
}

TEST_F(Cli, FitInputErrors) {
  const std::string missing = (dir_ / "absent.csv").string();
  CliRun r = run("fit --data " + missing + " --seed 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos);
  EXPECT_NE(run("fit --data " + missing).code, 0);
  const fs::path bad = write("bad.csv", "w0_mm,alpha_rad,chi_rad,contrast\n0.6,0.1,0.2,0.5\n0.6,x,0.2,0.5\n");
  r = run("fit --data " + bad.string() + " --seed 1 -o " + dir_.string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "fit_genome.json"));
}

TEST_F(Cli, OracleSuite) {
  CliRun r = run("oracle-suite");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  r = run("oracle-suite --gamma 0.3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("single-stage"), std::string::npos);
  EXPECT_EQ(run("oracle-suite --dx 0").code, 0);
}

TEST_F(Cli, CriticalStrengthAndFringe) {
  ASSERT_EQ(run("critical-strength -n 3 -o " + dir_.string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "critical_strength.csv").rfind("# schema=1\n", 0), 0u);
  ASSERT_EQ(run("fringe --w0 0.6 --alpha 0.5 -o " + dir_.string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "fringe.csv").rfind("# schema=1\n", 0), 0u);
}

TEST_F(Cli, ScanW0WritesTransition) {
  const fs::path cfg = write("scan.json", R"({"scan": {"w0_mm": [0.5, 1.0], "alpha_points": 91}})");
  ASSERT_EQ(run("scan-w0 -c " + cfg.string() + " -o " + dir_.string()).code, 0);
  for (const char* f : {"scan_w0.csv", "scan_w0_summary.csv", "transition.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
}
