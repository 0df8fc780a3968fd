#include <gtest/gtest.h>

#include <random>

#include "solver_instances.hpp"
#include "sweepout/rotation_solver.hpp"

using namespace sweepout;
using namespace sweepout::testing;

TEST(SolveRotation, Examples) {
  EXPECT_EQ(solve_rotation({}, 2), UnitRational(1, 2));
  EXPECT_EQ(solve_rotation({{Integer(1), 0}}, 2), UnitRational(1, 4));

  const std::vector<BinConstraint> two{{Integer(1), 1}, {Integer(5), 0}};
  const Rational r = solve_rotation(two, 2).value();
  const bool in_union = (Rational(3, 5) < r && r < Rational(7, 10)) || (Rational(4, 5) < r && r < Rational(9, 10));
  EXPECT_TRUE(in_union) << to_fraction_string(r);
  EXPECT_TRUE(verify_rotation(UnitRational(r), two, 2));
}

TEST(SolveRotation, BruteForceScanAgrees) {
  const std::vector<BinConstraint> two{{Integer(1), 1}, {Integer(5), 0}};
  std::vector<Rational> valid;
  for (long i = 1; i <= 999; ++i) {
    if (verify_rotation(UnitRational(i, 1000), two, 2)) valid.emplace_back(i, 1000);
  }
  ASSERT_FALSE(valid.empty());
  for (const auto& r : valid) {
    EXPECT_TRUE((Rational(3, 5) < r && r < Rational(7, 10)) || (Rational(4, 5) < r && r < Rational(9, 10)));
  }
}

TEST(VerifyRotation, Examples) {
  EXPECT_TRUE(verify_rotation(UnitRational(1, 4), {{Integer(1), 0}}, 2));
  EXPECT_FALSE(verify_rotation(UnitRational(1, 2), {{Integer(1), 0}}, 2));
  EXPECT_TRUE(verify_rotation(UnitRational(13, 20), {{Integer(1), 1}, {Integer(5), 0}}, 2));
}

TEST(SolveRotation, PreconditionErrors) {
  EXPECT_THROW(solve_rotation({{Integer(1), 2}}, 2), invalid_argument);
  EXPECT_THROW(solve_rotation({{Integer(0), 0}}, 2), invalid_argument);
  EXPECT_THROW(solve_rotation({{Integer(1), 0}}, 1), invalid_argument);
  EXPECT_THROW(solve_rotation({{Integer(5), 0}, {Integer(3), 0}}, 2), ratio_too_small);
  try {
    solve_rotation({{Integer(1), 0}, {Integer(5), 0}, {Integer(20), 1}}, 2);
    FAIL() << "expected ratio_too_small";
  } catch (const ratio_too_small& e) {
    EXPECT_EQ(e.position(), 1u);  // 20/5 = 4 is not > 2Q
  }
}

TEST(SolveRotation, TraceFormat) {
  auto sol = solve_rotation_traced({{Integer(1), 1}, {Integer(5), 0}}, 2);
  const std::string trace = format_trace(sol);
  EXPECT_NE(trace.find("j=0 a=1 target=1"), std::string::npos) << trace;
  EXPECT_NE(trace.find("r=" + to_fraction_string(sol.r.value())), std::string::npos) << trace;
  EXPECT_EQ(sol.steps.size(), 2u);
}

TEST(SolveRotation, SoundAndCompleteOnRandomInstances) {
  std::mt19937_64 rng(101);
  for (int iter = 0; iter < 300; ++iter) {
    const auto inst = random_valid_instance(rng);
    RotationSolution sol;
    ASSERT_NO_THROW(sol = solve_rotation_traced(inst.constraints, inst.Q)) << describe(inst);
    ASSERT_TRUE(verify_rotation(sol.r, inst.constraints, inst.Q)) << describe(inst);
  }
}

TEST(SolveRotation, FeasibleIntervalsAreNested) {
  std::mt19937_64 rng(202);
  for (int iter = 0; iter < 200; ++iter) {
    const auto inst = random_valid_instance(rng);
    const auto sol = solve_rotation_traced(inst.constraints, inst.Q);
    ASSERT_EQ(sol.intervals.size(), inst.constraints.size() + 1);
    EXPECT_EQ(sol.intervals[0].lo, 0);
    EXPECT_EQ(sol.intervals[0].hi, 1);
    for (std::size_t j = 0; j + 1 < sol.intervals.size(); ++j) {
      ASSERT_LE(sol.intervals[j].lo, sol.intervals[j + 1].lo);
      ASSERT_GE(sol.intervals[j].hi, sol.intervals[j + 1].hi);
      ASSERT_LT(sol.intervals[j + 1].lo, sol.intervals[j + 1].hi);
    }
    // Every interior point of every state meets the constraints processed so far.
    for (std::size_t j = 1; j < sol.intervals.size(); ++j) {
      const std::vector<BinConstraint> prefix(inst.constraints.begin(), inst.constraints.begin() + j);
      const auto& s = sol.intervals[j];
      for (int t = 1; t <= 7; ++t) {
        ASSERT_TRUE(verify_rotation(UnitRational(s.lo + (s.hi - s.lo) * Rational(t, 8)), prefix, inst.Q));
      }
    }
  }
}

TEST(SolveRotation, RatioTooSmallOnViolatingInstances) {
  std::mt19937_64 rng(303);
  for (int iter = 0; iter < 100; ++iter) {
    const auto inst = random_violating_instance(rng);
    EXPECT_THROW(solve_rotation(inst.constraints, inst.Q), ratio_too_small) << describe(inst);
  }
}

TEST(SolveRotation, FineGridOracleAgreesOnSmallInstances) {
  std::mt19937_64 rng(404);
  int compared = 0;
  while (compared < 40) {
    auto inst = random_valid_instance(rng, 3);
    if (product(inst) > 1'000'000) continue;
    ++compared;
    EXPECT_TRUE(fine_grid_feasible(inst)) << describe(inst);
    EXPECT_NO_THROW(solve_rotation(inst.constraints, inst.Q)) << describe(inst);
  }
}
