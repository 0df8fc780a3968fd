#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sweepout/io.hpp"
#include "sweepout/sweepout.hpp"

using namespace sweepout;

TEST(ParseRational, AcceptedForms) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(parse_rational("0.05"), Rational(1, 20));
  EXPECT_EQ(parse_rational("-1.5"), Rational(-3, 2));
  EXPECT_EQ(parse_rational(".5"), Rational(1, 2));
  for (const char* bad : {"", "1/0", "abc", "1.", "1/x", "1.-5", "--1"}) {
    EXPECT_THROW(parse_rational(bad), invalid_argument) << bad;
  }
}

TEST(ParseRational, FractionStringRoundTrip) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 1000; ++i) {
    Rational x(Integer(static_cast<long>(rng() % 2000001) - 1000000) * Integer(static_cast<unsigned long>(rng())),
               Integer(static_cast<unsigned long>(1 + rng() % 1000000)));
    x.canonicalize();
    EXPECT_EQ(parse_rational(to_fraction_string(x)), x);
  }
  EXPECT_EQ(to_fraction_string(Rational(4)), "4/1");
  EXPECT_EQ(approx_decimal(Rational(9, 25), 3), "0.360");
}

TEST(SequenceFile, RoundTripAndErrors) {
  auto seq = generate_ratio_sequence(Rational(7, 2), 3, 60);
  std::stringstream buf;
  io::write_sequence(buf, seq);
  EXPECT_EQ(io::read_sequence(buf), seq);

  std::istringstream bad("# start_index=1\n5\n3\n");
  EXPECT_THROW(io::read_sequence(bad), sequence_error);
  std::istringstream garbage("# start_index=1\n5\nx7\n");
  EXPECT_THROW(io::read_sequence(garbage), parse_error);
  std::istringstream no_header("1\n2\n");
  EXPECT_EQ(io::read_sequence(no_header).start_index(), 1u);
}

TEST(ConstraintFile, Parses) {
  std::istringstream in("# a target\n1 1\n5 0\n");
  auto c = io::read_constraints(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].a, 5);
  EXPECT_EQ(c[0].target, 1u);
  std::istringstream bad("7\n");
  EXPECT_THROW(io::read_constraints(bad), parse_error);
}

TEST(DrawFile, RoundTripBothProfiles) {
  for (const auto& profile :
       {ProbabilityProfile::log_log_log(Rational(1, 2)), ProbabilityProfile::constant(Rational(1, 7), 20)}) {
    auto draw = sample_sequence(profile, 20000, 99);
    std::stringstream buf;
    io::write_draw(buf, draw);
    EXPECT_EQ(io::read_draw(buf), draw);
  }
  std::istringstream unsorted("# seed=1\n# eta=1/2\n# n_start=16\n# t_max=100\n50\n20\n");
  EXPECT_THROW(io::read_draw(unsorted), parse_error);
  std::istringstream missing("# seed=1\n# n_start=16\n# t_max=100\n");
  EXPECT_THROW(io::read_draw(missing), parse_error);
}

TEST(ThinningFile, RoundTrip) {
  const Rational eta(1, 2);
  IntervalGrid grid(eta, 1'000'000);
  auto draw = RandomDraw{0, ProbabilityProfile::log_log_log(eta), 1'000'000,
                         {100, 7000, 9000, 10000, 20000, 500000, 900000}};
  auto r = thin(draw, grid);
  std::stringstream buf;
  io::write_thinning(buf, r, eta, 1'000'000);
  auto f = io::read_thinning(buf);
  EXPECT_EQ(f.eta, eta);
  EXPECT_EQ(f.t_max, 1'000'000u);
  EXPECT_EQ(f.result, r);
}

TEST(DensityCsv, ExactRatioColumns) {
  std::vector<DensityRow> rows{{10, 0, 0, std::nullopt}, {20, 4, 2, Rational(1, 2)}};
  std::ostringstream out;
  io::write_density_csv(out, rows);
  EXPECT_EQ(out.str(), "t,A_t,B_t,ratio_num,ratio_den\n10,0,0,,\n20,4,2,1,2\n");
}

TEST(GridArtifact, JsonRoundTrip) {
  io::GridArtifact g;
  PlanOverrides ov;
  ov.Q = 10;
  ov.K = 2;
  ov.block_length = 4;
  g.params = plan_parameters(Rational(2, 3), Rational(1, 2), 2, GridMode::demo, ov);
  g.blocks = {{1, 4}, {5, 8}};
  g.n_total = 400;
  g.rotation = RotationVector({UnitRational(Rational(123456789, 987654321)), UnitRational(1, 3)});
  g.sequence_file = "seq.txt";
  const auto j = io::to_json(g);
  EXPECT_EQ(j.at("enumeration"), "mixed-radix-le");
  EXPECT_EQ(j.at("rotation").at(0), "13717421/109739369");
  auto back = io::grid_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.params.Q, 10u);
  EXPECT_EQ(back.params.eta, Rational(2, 3));
  EXPECT_EQ(back.params.epsilon, Rational(1, 2));
  EXPECT_EQ(back.params.block_length, 4u);
  EXPECT_EQ(back.blocks, g.blocks);
  EXPECT_EQ(back.rotation, g.rotation);
  EXPECT_EQ(back.sequence_file, "seq.txt");

  auto broken = j;
  broken.erase("rotation");
  EXPECT_THROW(io::grid_from_json(broken), parse_error);
}
