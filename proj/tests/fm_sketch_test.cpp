#include "rainsketch/fm_sketch.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rainsketch/errors.hpp"
#include "rainsketch/hashing.hpp"
#include "test_util.hpp"

namespace rainsketch {
namespace {

std::string id_at_position(std::uint32_t target, HashSeed seed, std::uint32_t width) {
  for (int i = 0;; ++i) {
    auto id = "probe-" + std::to_string(i);
    if (position_of(id, seed, width).index == target) return id;
  }
}

double sample_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TEST(FmSketch, InsertSetsMappedBit) {
  const HashSeed seed{3};
  FmSketch sketch;
  sketch.insert(id_at_position(0, seed, 64), seed);
  EXPECT_EQ(sketch.bits(), 1u);
  EXPECT_TRUE(sketch.test(0));
  EXPECT_FALSE(sketch.test(1));
}

TEST(FmSketch, InsertIsIdempotent) {
  FmSketch once;
  FmSketch twice;
  once.insert("alice", HashSeed{1});
  twice.insert("alice", HashSeed{1});
  twice.insert("alice", HashSeed{1});
  EXPECT_EQ(once, twice);
}

TEST(FmSketch, ThousandIdsAlwaysSetBitZero) {
  for (int trial = 0; trial < 100; ++trial) {
    FmSketch sketch;
    for (const auto& id : testing::distinct_ids(1000, trial)) {
      sketch.insert(id, HashSeed{static_cast<std::uint64_t>(trial)});
    }
    ASSERT_TRUE(sketch.test(0)) << "trial " << trial;
  }
}

TEST(FmSketch, Lsb0) {
  EXPECT_EQ(FmSketch().lsb0(), 0u);
  // bits 1,1,0,1 from position 0 upwards
  EXPECT_EQ(FmSketch::from_bits(0b1011, 64).lsb0(), 2u);
  EXPECT_EQ(FmSketch::from_bits(0xFF, 8).lsb0(), 8u);
  EXPECT_EQ(FmSketch::from_bits(~std::uint64_t{0}, 64).lsb0(), 64u);
  EXPECT_EQ(FmSketch::from_bits(0b0110, 64).lsb0(), 0u);
}

TEST(FmSketch, FromBitsRejectsBitsBeyondWidth) {
  EXPECT_THROW(FmSketch::from_bits(0x100, 8), InvalidArgument);
  EXPECT_THROW(FmSketch(0), InvalidArgument);
  EXPECT_THROW(FmSketch(65), InvalidArgument);
}

TEST(FmSketch, Estimate) {
  EXPECT_EQ(FmSketch().estimate(), 0.0);
  EXPECT_NEAR(FmSketch::from_bits(0b0111, 64).estimate(), 10.3424, 1e-4);
  EXPECT_DOUBLE_EQ(FmSketch::from_bits(0b0111, 64).estimate(), 8.0 / 0.77351);
  EXPECT_NEAR(FmSketch::from_bits(0b0100, 64).estimate(), 1.29281, 1e-5);
}

TEST(FmSketch, MergeWithEmptyIsIdentity) {
  FmSketch a;
  a.insert("x", HashSeed{1});
  a.insert("y", HashSeed{1});
  FmSketch merged = a;
  merged.merge(FmSketch());
  EXPECT_EQ(merged, a);
}

TEST(FmSketch, MergeIsUnion) {
  FmSketch a;
  FmSketch b;
  FmSketch both;
  a.insert("a", HashSeed{4});
  b.insert("b", HashSeed{4});
  both.insert("a", HashSeed{4});
  both.insert("b", HashSeed{4});
  a.merge(b);
  EXPECT_EQ(a, both);
}

TEST(FmSketch, MergeOfHalvesEqualsFullStream) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const HashSeed seed{rng()};
    std::vector<std::string> ids;
    for (int i = 0; i < 200; ++i) ids.push_back(testing::random_id(rng));
    FmSketch full;
    FmSketch left;
    FmSketch right;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      full.insert(ids[i], seed);
      (i < ids.size() / 2 ? left : right).insert(ids[i], seed);
    }
    left.merge(right);
    ASSERT_EQ(left, full) << "trial " << trial;
  }
}

TEST(FmSketch, MergeRejectsWidthMismatch) {
  FmSketch a(32);
  EXPECT_THROW(a.merge(FmSketch(64)), IncompatibleSketch);
}

TEST(FmSketch, StateDependsOnlyOnTheSetOfIds) {
  std::mt19937_64 rng(5);
  auto ids = testing::distinct_ids(300, 1);
  FmSketch ordered;
  for (const auto& id : ids) ordered.insert(id, HashSeed{8});
  std::shuffle(ids.begin(), ids.end(), rng);
  FmSketch shuffled;
  for (const auto& id : ids) {
    shuffled.insert(id, HashSeed{8});
    shuffled.insert(id, HashSeed{8});
  }
  EXPECT_EQ(ordered, shuffled);
}

TEST(FmSketch, InsertNeverClearsBitsAndEstimateIsCalibrated) {
  FmSketch sketch;
  std::uint32_t last_lsb0 = 0;
  std::uint64_t last_bits = 0;
  for (const auto& id : testing::distinct_ids(2000, 9)) {
    sketch.insert(id, HashSeed{10});
    ASSERT_EQ(sketch.bits() & last_bits, last_bits);
    ASSERT_GE(sketch.lsb0(), last_lsb0);
    ASSERT_GE(sketch.estimate(), 1.0 / kFmCorrection);
    last_bits = sketch.bits();
    last_lsb0 = sketch.lsb0();
  }
}

TEST(EnsembleEstimate, AllEmptyIsZero) {
  const std::vector<FmSketch> rows(4, FmSketch());
  EXPECT_EQ(ensemble_estimate(rows), 0.0);
  EXPECT_EQ(ensemble_estimate(rows, Averaging::kMeanEstimate), 0.0);
}

TEST(EnsembleEstimate, AveragesIndicesBeforeExponentiating) {
  const std::vector<FmSketch> rows = {FmSketch::from_bits(0b0011, 64),
                                      FmSketch::from_bits(0b1111, 64)};
  EXPECT_DOUBLE_EQ(ensemble_estimate(rows), 8.0 / 0.77351);
  EXPECT_NEAR(ensemble_estimate(rows), 10.3424, 1e-4);
  // (4 + 16) / 2 / 0.77351
  EXPECT_DOUBLE_EQ(ensemble_estimate(rows, Averaging::kMeanEstimate), 10.0 / 0.77351);
}

TEST(EnsembleEstimate, RejectsNoRows) {
  EXPECT_THROW(ensemble_estimate({}), InvalidArgument);
}

TEST(FmEnsemble, RejectsDuplicateOrMissingSeeds) {
  EXPECT_THROW(FmEnsemble({HashSeed{1}, HashSeed{1}}), InvalidArgument);
  EXPECT_THROW(FmEnsemble({}), InvalidArgument);
}

TEST(FmEnsemble, MergeRequiresSameSeeds) {
  auto a = FmEnsemble::seeded(1, 4);
  auto b = FmEnsemble::seeded(2, 4);
  EXPECT_THROW(a.merge(b), IncompatibleSketch);
  EXPECT_THROW(a.merge(FmEnsemble::seeded(1, 3)), IncompatibleSketch);
  EXPECT_THROW(a.merge(FmEnsemble::seeded(1, 4, 32)), IncompatibleSketch);
}

TEST(FmEnsemble, TenThousandIdsWithin30Percent) {
  constexpr double kN = 10'000;
  int within = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto ensemble = FmEnsemble::seeded(1000 + trial, 64);
    for (const auto& id : testing::distinct_ids(10'000, trial)) ensemble.insert(id);
    if (std::abs(ensemble.estimate() - kN) <= 0.3 * kN) ++within;
  }
  EXPECT_GE(within, 90);
}

TEST(FmEnsemble, SpreadShrinksWithMoreRows) {
  std::vector<double> sd;
  for (std::size_t k : {4, 16, 64}) {
    std::vector<double> ratios;
    for (int trial = 0; trial < 100; ++trial) {
      auto ensemble = FmEnsemble::seeded(500 + trial, k);
      for (const auto& id : testing::distinct_ids(10'000, trial)) ensemble.insert(id);
      ratios.push_back(ensemble.estimate() / 10'000.0);
    }
    sd.push_back(sample_sd(ratios));
  }
  EXPECT_GT(sd[0], sd[1]);
  EXPECT_GT(sd[1], sd[2]);
}

TEST(RequiredSketchCount, UnitCase) {
  EXPECT_EQ(required_sketch_count({1.0, 2.0 / std::exp(1.0), 1.0}), 1u);
}

TEST(RequiredSketchCount, TenPercentFivePercent) {
  // ceil(ln(40) / 0.01) = ceil(368.88)
  EXPECT_EQ(required_sketch_count({0.1, 0.05, 1.0}), 369u);
}

TEST(RequiredSketchCount, HalvingEpsilonQuadruples) {
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto k = required_sketch_count({eps, 0.05, 1.0});
    const auto k_half = required_sketch_count({eps / 2, 0.05, 1.0});
    EXPECT_LE(k_half, 4 * k);
    EXPECT_GE(k_half + 3, 4 * k);
  }
}

TEST(RequiredSketchCount, ScalesWithConstantAndRejectsBadParams) {
  EXPECT_EQ(required_sketch_count({0.1, 0.05, 2.0}), 738u);
  EXPECT_THROW(required_sketch_count({0.0, 0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(required_sketch_count({0.1, 1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(required_sketch_count({0.1, 0.1, 0.0}), InvalidArgument);
}

}  // namespace
}  // namespace rainsketch
