#include <gtest/gtest.h>

#include <random>

#include "sweepout/grid.hpp"

using namespace sweepout;

TEST(PrefixSums, HarmonicNumbers) {
  auto g = prefix_sums(WeightSequence::harmonic(), 4);
  EXPECT_EQ(g[0], 0);
  EXPECT_EQ(g[3], Rational(11, 6));
  EXPECT_EQ(g[4], Rational(25, 12));
}

TEST(InversePrefix, HarmonicGInverseOfTwoIsFour) {
  auto g = prefix_sums(WeightSequence::harmonic(), 10);
  EXPECT_EQ(inverse_prefix(g, 2), 4u);
  EXPECT_EQ(inverse_prefix(g, Rational(11, 6)), 3u);  // G(n) >= y, equality counts
  EXPECT_EQ(inverse_prefix(g, 100), std::nullopt);
}

TEST(WeightSequence, RejectsOutOfRangeWeights) {
  EXPECT_THROW(WeightSequence::constant(0)(1), invalid_argument);
  EXPECT_THROW(WeightSequence::constant(Rational(3, 2))(1), invalid_argument);
  EXPECT_EQ(WeightSequence::constant(1)(7), 1);
}

TEST(WeightedBlockIntervals, UnitWeightsGiveDyadicBlocks) {
  auto blocks = weighted_block_intervals(WeightSequence::constant(1), 0, 3, 16);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0], (IndexBlock{3, 4}));
  EXPECT_EQ(blocks[1], (IndexBlock{5, 8}));
  EXPECT_EQ(blocks[2], (IndexBlock{9, 16}));

  auto shifted = weighted_block_intervals(WeightSequence::constant(1), 2, 1, 16);
  EXPECT_EQ(shifted[0], (IndexBlock{9, 16}));
}

TEST(WeightedBlockIntervals, HarmonicOutOfRange) {
  EXPECT_THROW(weighted_block_intervals(WeightSequence::harmonic(), 0, 1, 3), threshold_out_of_range);
  // H_n >= 4 first at n = 31.
  auto blocks = weighted_block_intervals(WeightSequence::harmonic(), 0, 1, 31);
  EXPECT_EQ(blocks[0], (IndexBlock{5, 31}));
}

TEST(WeightedAverage, FractionExample) {
  // r = 1/10, x = 0: a = 11 lands at 1/10 (hit), a = 15 at 1/2 (miss).
  IntegerSequence seq(1, {Integer(1), Integer(11), Integer(15)});
  BadSet bad{1, 10};
  RotationVector r({UnitRational(1, 10)});
  TorusPoint x({UnitRational(0, 1)});
  EXPECT_EQ(weighted_average(x, {2, 3}, WeightSequence::harmonic(), seq, r, bad), Rational(3, 5));
  EXPECT_EQ(block_average(x, {2, 3}, seq, r, bad), Rational(1, 2));
}

TEST(WeightedAverage, AllHitsIsOne) {
  auto seq = generate_ratio_sequence(5, 1, 20);
  BadSet bad{1, 10};
  RotationVector zero({UnitRational(0, 1)});
  TorusPoint x({UnitRational(1, 20)});
  EXPECT_EQ(weighted_average(x, {1, 20}, WeightSequence::harmonic(), seq, zero, bad), 1);
  EXPECT_THROW(weighted_average(x, {5, 4}, WeightSequence::harmonic(), seq, zero, bad), empty_block);
}

TEST(WeightedAverage, ConstantWeightsDegenerateToBlockAverage) {
  std::mt19937_64 rng(47);
  auto seq = generate_ratio_sequence(3, 1, 40);
  for (int iter = 0; iter < 200; ++iter) {
    const std::uint64_t K = 1 + rng() % 3;
    const std::uint64_t Q = 3 + rng() % 10;
    std::vector<UnitRational> xs, rs;
    for (std::uint64_t c = 0; c < K; ++c) {
      xs.emplace_back(make_rational(static_cast<long>(rng() % 1000), 1000));
      rs.emplace_back(make_rational(static_cast<long>(rng() % 10007), 10007));
    }
    const std::uint64_t lo = 1 + rng() % 40;
    const std::uint64_t hi = lo + rng() % (41 - lo);
    const Rational c = make_rational(static_cast<long>(1 + rng() % 100), 100);
    TorusPoint x(xs), r(rs);
    BadSet bad{K, Q};
    ASSERT_EQ(weighted_average(x, {lo, hi}, WeightSequence::constant(c), seq, r, bad),
              block_average(x, {lo, hi}, seq, r, bad));
  }
}
