#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sweepout_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(SWEEPOUT_CLI) + " " + args + " 2>" + path("stderr.txt") + " >" + path("stdout.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenSeqExampleMatchesGolden) {
  ASSERT_EQ(run("gen-seq --kind paper --eta 1 --n0 3 --count 5 --out " + path("p.txt")), 0);
  EXPECT_EQ(slurp(path("p.txt")), slurp(std::string(SWEEPOUT_GOLDEN_DIR) + "/example_eta1_n3_count5.txt"));
  auto manifest = nlohmann::json::parse(slurp(path("p.txt.manifest.json")));
  EXPECT_EQ(manifest.at("subcommand"), "gen-seq");
  EXPECT_EQ(manifest.at("parameters").at("n0"), 3);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
}

TEST_F(Cli, GenSeqRatioAndPreconditions) {
  ASSERT_EQ(run("gen-seq --kind ratio --rho 5 --start 1 --count 400 --out " + path("r.txt")), 0);
  std::istringstream lines(slurp(path("r.txt")));
  std::string line;
  int terms = 0;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#') ++terms;
  EXPECT_EQ(terms, 400);
  EXPECT_EQ(run("gen-seq --kind paper --n0 2 --count 1"), 2);
  EXPECT_EQ(run("gen-seq --kind nonsense --count 1"), 2);
  EXPECT_EQ(run("gen-seq --count 1"), 2);
}

TEST_F(Cli, VerifyGrowthExitCodes) {
  write("ok.txt", "# start_index=1\n1\n3\n7\n15\n31\n");
  write("tie.txt", "# start_index=1\n10\n20\n");
  EXPECT_EQ(run("verify-growth --seq " + path("ok.txt") + " --kind fixed --rho 2"), 0);
  EXPECT_EQ(run("verify-growth --seq " + path("tie.txt") + " --kind fixed --rho 2 --out " + path("rep.json")), 1);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("rep.json"))).at("first_violation"), 1);
  EXPECT_EQ(run("verify-growth --seq " + path("ok.txt") + " --kind loglog --eta 1 --strict"), 2);
  EXPECT_EQ(run("verify-growth --seq " + path("missing.txt")), 2);
}

TEST_F(Cli, SolveRotationWithTrace) {
  write("c.txt", "1 1\n5 0\n");
  ASSERT_EQ(run("solve-rotation --constraints " + path("c.txt") + " --Q 2 --trace " + path("trace.txt") +
                " --out " + path("r.json")),
            0);
  auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(j.at("verified"), true);
  EXPECT_NE(slurp(path("trace.txt")).find("r=" + j.at("r").get<std::string>()), std::string::npos);
  write("bad.txt", "1 0\n5 0\n20 1\n");
  EXPECT_EQ(run("solve-rotation --constraints " + path("bad.txt") + " --Q 2"), 2);
}

TEST_F(Cli, SweepoutDemoAndPlannerRejection) {
  ASSERT_EQ(run("gen-seq --kind ratio --rho 5 --start 1 --count 400 --out " + path("seq.txt")), 0);
  const std::string base = "--seq " + path("seq.txt") + " --Q 10 --block-length 4 --epsilon 1/2 --C 2";
  ASSERT_EQ(run("verify-sweepout " + base + " --K 2 --out " + path("rep.json")), 0);
  auto rep = nlohmann::json::parse(slurp(path("rep.json")));
  EXPECT_EQ(rep.at("cubes").size(), 100u);
  EXPECT_TRUE(fs::exists(path("rep.json.csv")));
  EXPECT_EQ(run("verify-sweepout " + base + " --K 3"), 2);
}

TEST_F(Cli, CorruptedRotationFailsWithWitness) {
  ASSERT_EQ(run("gen-seq --kind ratio --rho 5 --start 1 --count 400 --out " + path("seq.txt")), 0);
  ASSERT_EQ(run("build-grid --seq " + path("seq.txt") +
                " --Q 10 --K 2 --block-length 4 --epsilon 1/2 --C 2 --out " + path("grid.json")),
            0);
  ASSERT_EQ(run("verify-sweepout --grid " + path("grid.json") + " --out " + path("ok.json")), 0);

  auto grid = nlohmann::json::parse(slurp(path("grid.json")));
  grid["rotation"][0] = "1/3";
  write("bad.json", grid.dump());
  EXPECT_EQ(run("verify-sweepout --grid " + path("bad.json") + " --out " + path("bad_rep.json")), 1);
  EXPECT_NE(slurp(path("stderr.txt")).find("first failing cube"), std::string::npos);
  auto rep = nlohmann::json::parse(slurp(path("bad_rep.json")));
  bool witness = false;
  for (const auto& c : rep.at("cubes")) witness = witness || !c.at("witness").is_null();
  EXPECT_TRUE(witness);

  write("garbage.json", "{not json");
  EXPECT_EQ(run("verify-sweepout --grid " + path("garbage.json")), 2);
}

TEST_F(Cli, RandomThinDensityPipeline) {
  ASSERT_EQ(run("random --eta 0.5 --tmax 1000000 --seed 42 --out " + path("d1.txt")), 0);
  ASSERT_EQ(run("random --eta 1/2 --tmax 1000000 --seed 42 --threads 4 --out " + path("d2.txt")), 0);
  EXPECT_EQ(slurp(path("d1.txt")), slurp(path("d2.txt")));

  ASSERT_EQ(run("thin --draw " + path("d1.txt") + " --out " + path("t.txt")), 0);
  EXPECT_NE(slurp(path("stderr.txt")).find("verification=pass"), std::string::npos);
  ASSERT_EQ(run("density --draw " + path("d1.txt") + " --thinning " + path("t.txt") + " --out " + path("den.csv")), 0);
  EXPECT_EQ(slurp(path("den.csv")), slurp(std::string(SWEEPOUT_GOLDEN_DIR) + "/density_eta1_2_seed42.csv"));

  EXPECT_EQ(run("thin --draw " + path("d1.txt") + " --eta 1/3"), 2);
}

TEST_F(Cli, SigmaReportsUn) {
  ASSERT_EQ(run("sigma --eta 1/2 --n 3 --out " + path("s.json")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("s.json"))).at("u_n"), 1621);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("gen-seq --kind ratio --count 3 --precision-cap 10"), 2);
  EXPECT_EQ(run("--help"), 0);
}
