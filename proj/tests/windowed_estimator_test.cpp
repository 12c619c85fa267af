#include "rainsketch/windowed_estimator.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "rainsketch/errors.hpp"
#include "test_util.hpp"

namespace rainsketch {
namespace {

WindowConfig small_config(std::uint64_t delta = 100) {
  WindowConfig config;
  config.delta = delta;
  config.rate_bound = 5.0;
  config.accuracy = {0.1, 0.1, 1.0};
  config.capacity_hint = 1000.0;
  config.sketch_count = 8;
  return config;
}

RankEnsemble ensemble_with(const WindowConfig& config,
                           const std::vector<RainCheckEvent>& events) {
  auto ensemble = RankEnsemble::seeded(config.base_seed, config.resolved_sketch_count(),
                                       config.width);
  for (const auto& e : events) ensemble.insert(e);
  return ensemble;
}

TEST(WindowedEstimator, FirstEventLandsInWindowZero) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.observe({"a", Timestamp{0}}, Timestamp{0});
  EXPECT_EQ(estimator.window_index(), 0u);
  EXPECT_EQ(estimator.current(), ensemble_with(config, {{"a", Timestamp{0}}}));
  EXPECT_EQ(estimator.snapshot()->sketch, ensemble_with(config, {}));
}

TEST(WindowedEstimator, BoundaryIsHalfOpen) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.observe({"early", Timestamp{99}}, Timestamp{99});
  estimator.observe({"late", Timestamp{100}}, Timestamp{100});
  EXPECT_EQ(estimator.window_index(), 1u);
  EXPECT_EQ(estimator.snapshot()->sketch, ensemble_with(config, {{"early", Timestamp{99}}}));
  EXPECT_EQ(estimator.current(), ensemble_with(config, {{"late", Timestamp{100}}}));
}

TEST(WindowedEstimator, AdvanceWithinWindowIsNoOp) {
  WindowedEstimator estimator(small_config());
  estimator.observe({"a", Timestamp{10}}, Timestamp{10});
  const auto before = estimator.serialize();
  const auto snapshot = estimator.snapshot();
  estimator.advance_to(Timestamp{10});
  EXPECT_EQ(estimator.snapshot(), snapshot);
  estimator.advance_to(Timestamp{99});
  EXPECT_EQ(estimator.snapshot(), snapshot);
  EXPECT_EQ(estimator.window_index(), 0u);
}

TEST(WindowedEstimator, GapLeavesCompletedWindowEmpty) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.observe({"a", Timestamp{150}}, Timestamp{150});
  estimator.advance_to(Timestamp{450});
  EXPECT_EQ(estimator.window_index(), 4u);
  EXPECT_EQ(estimator.snapshot()->window_index, 4u);
  EXPECT_EQ(estimator.snapshot()->sketch, ensemble_with(config, {}));
  EXPECT_EQ(estimator.current(), ensemble_with(config, {}));
}

TEST(WindowedEstimator, RotationAtExactBoundaryMovesEventsToNewWindow) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.observe({"a", Timestamp{50}}, Timestamp{50});
  estimator.observe({"b", Timestamp{200}}, Timestamp{200});
  EXPECT_EQ(estimator.window_index(), 2u);
  // Window 1 saw nothing.
  EXPECT_EQ(estimator.snapshot()->sketch, ensemble_with(config, {}));
  EXPECT_EQ(estimator.current(), ensemble_with(config, {{"b", Timestamp{200}}}));
}

TEST(WindowedEstimator, RejectsTimeRegressionAndFutureEvents) {
  WindowedEstimator estimator(small_config());
  estimator.advance_to(Timestamp{50});
  EXPECT_THROW(estimator.advance_to(Timestamp{49}), TimeRegression);
  EXPECT_THROW(estimator.observe({"a", Timestamp{10}}, Timestamp{40}), TimeRegression);
  EXPECT_THROW(estimator.observe({"a", Timestamp{60}}, Timestamp{55}), InvalidArgument);
  EXPECT_THROW(estimator.observe({"", Timestamp{50}}, Timestamp{55}), InvalidArgument);
  EXPECT_THROW(estimator.observe({"a", Timestamp::empty()}, Timestamp{55}), InvalidArgument);
}

TEST(WindowedEstimator, EmptyCompletedWindowGivesZeroRankAndFullBound) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.advance_to(Timestamp{130});
  const auto est = estimator.estimate_rank(Timestamp{120}, Timestamp{130});
  EXPECT_EQ(est.estimated_rank, 0.0);
  // 0.1 * 1000 + (130 - 0) * 5
  EXPECT_DOUBLE_EQ(est.error_bound, 100.0 + 130.0 * 5.0);
  EXPECT_EQ(est.window_index, 1u);
  EXPECT_EQ(est.queried_ts, Timestamp{120});
}

TEST(WindowedEstimator, BoundAtFreshRotationIsEpsNPlusDeltaRs) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  estimator.advance_to(Timestamp{300});
  EXPECT_DOUBLE_EQ(estimator.estimate_rank(Timestamp{250}, Timestamp{300}).error_bound,
                   100.0 + 100.0 * 5.0);
}

TEST(WindowedEstimator, QueriesOutsideCurrentWindowAreStale) {
  WindowedEstimator estimator(small_config());
  estimator.advance_to(Timestamp{250});
  EXPECT_THROW(estimator.estimate_rank(Timestamp{10}, Timestamp{199}), StaleWindow);
  EXPECT_THROW(estimator.estimate_rank(Timestamp{10}, Timestamp{300}), StaleWindow);
  EXPECT_NO_THROW(estimator.estimate_rank(Timestamp{10}, Timestamp{299}));
}

TEST(WindowedEstimator, EstimateUsesCompletedWindowOnly) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  std::vector<RainCheckEvent> previous;
  for (int i = 0; i < 40; ++i) {
    previous.push_back({"p" + std::to_string(i), Timestamp{static_cast<std::uint64_t>(i)}});
    estimator.observe(previous.back(), Timestamp{static_cast<std::uint64_t>(i)});
  }
  for (int i = 0; i < 40; ++i) {
    estimator.observe({"q" + std::to_string(i), Timestamp{100}}, Timestamp{100});
  }
  const auto expected = ensemble_with(config, previous).count_at_most(Timestamp{20});
  EXPECT_DOUBLE_EQ(estimator.estimate_rank(Timestamp{20}, Timestamp{120}).estimated_rank,
                   expected);
}

TEST(WindowedEstimator, QueriesDoNotMutateState) {
  WindowedEstimator estimator(small_config());
  std::mt19937_64 rng(3);
  for (std::uint64_t t = 0; t < 250; ++t) {
    estimator.observe({testing::random_id(rng), Timestamp{t}}, Timestamp{t});
  }
  const auto before = estimator.serialize();
  for (std::uint64_t x = 0; x < 300; x += 7) estimator.estimate_rank(Timestamp{x}, Timestamp{249});
  EXPECT_EQ(estimator.serialize(), before);
}

TEST(WindowErrorBound, Examples) {
  WindowConfig config = small_config(50);
  config.accuracy.epsilon = 0.0;
  config.rate_bound = 2.0;
  // t_cur = (i-1) * delta
  EXPECT_EQ(window_error_bound(config, Timestamp{100}, 3), 0.0);

  config.accuracy.epsilon = 0.1;
  // i = 3, t_cur = 3 * 50 + 25, t_cur - (i-1) * delta = 75
  EXPECT_DOUBLE_EQ(window_error_bound(config, Timestamp{175}, 3), 250.0);

  double worst = 0.0;
  for (std::uint64_t t = 150; t < 200; ++t) {
    worst = std::max(worst, window_error_bound(config, Timestamp{t}, 3));
  }
  const double cap = 0.1 * 1000.0 + 2.0 * 50.0 * 2.0;
  EXPECT_LE(worst, cap);
  EXPECT_DOUBLE_EQ(worst, cap - 2.0);  // one tick short of (i+1) * delta
  EXPECT_THROW(window_error_bound(config, Timestamp{99}, 3), InvalidArgument);
}

TEST(WindowedEstimator, SerializationRoundTrip) {
  const auto config = small_config();
  WindowedEstimator estimator(config);
  std::mt19937_64 rng(21);
  for (std::uint64_t t = 0; t < 330; ++t) {
    estimator.observe({testing::random_id(rng), Timestamp{t}}, Timestamp{t});
  }
  const auto bytes = estimator.serialize();
  const std::size_t k = 8;
  const std::size_t w = 64;
  EXPECT_EQ(bytes.size(), kSnapshotHeaderSize + 8 * (2 * k * w + 2 * k + 2));
  const auto restored = WindowedEstimator::deserialize(config, bytes);
  EXPECT_EQ(restored.serialize(), bytes);
  EXPECT_EQ(restored.window_index(), 3u);
  EXPECT_EQ(restored.now(), Timestamp{329});
  EXPECT_EQ(restored.estimate_rank(Timestamp{250}, Timestamp{329}).estimated_rank,
            estimator.estimate_rank(Timestamp{250}, Timestamp{329}).estimated_rank);

  auto other = config;
  other.sketch_count = 9;
  EXPECT_THROW(WindowedEstimator::deserialize(other, bytes), IncompatibleSketch);
  Bytes truncated(bytes.begin(), bytes.end() - 8);
  EXPECT_THROW(WindowedEstimator::deserialize(config, truncated), FormatError);
}

TEST(WindowedEstimator, ReplayIsByteIdentical) {
  std::mt19937_64 rng(1);
  std::vector<RainCheckEvent> trace;
  std::uint64_t t = 0;
  for (int i = 0; i < 10'000; ++i) {
    t += rng() % 3;
    trace.push_back({testing::random_id(rng), Timestamp{t - std::min<std::uint64_t>(t, rng() % 5)}});
  }
  const auto run = [&] {
    WindowedEstimator estimator(small_config());
    std::uint64_t now = 0;
    for (const auto& e : trace) {
      now = std::max(now, e.ts.tick);
      estimator.observe(e, Timestamp{now});
    }
    return estimator.serialize();
  };
  EXPECT_EQ(run(), run());
}

// Readers must never observe a completed sketch paired with the wrong index.
TEST(WindowedEstimator, RotationIsAtomicForReaders) {
  const auto config = small_config(10);
  WindowedEstimator estimator(config);
  constexpr std::uint64_t kWindows = 400;
  std::vector<RankEnsemble> expected;
  expected.push_back(ensemble_with(config, {}));
  for (std::uint64_t i = 1; i <= kWindows; ++i) {
    expected.push_back(ensemble_with(
        config, {{"w" + std::to_string(i - 1), Timestamp{(i - 1) * 10}}}));
  }

  std::atomic<bool> done{false};
  std::atomic<int> mismatches{0};
  std::atomic<long> checks{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!done.load()) {
        const auto snap = estimator.snapshot();
        if (snap->sketch != expected.at(snap->window_index)) ++mismatches;
        ++checks;
      }
    });
  }
  for (std::uint64_t i = 0; i < kWindows; ++i) {
    estimator.observe({"w" + std::to_string(i), Timestamp{i * 10}}, Timestamp{i * 10});
  }
  estimator.advance_to(Timestamp{kWindows * 10});
  done = true;
  for (auto& th : readers) th.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_GT(checks.load(), 0);
  EXPECT_EQ(estimator.snapshot()->sketch, expected.back());
}

TEST(WindowConfig, Validation) {
  auto config = small_config();
  config.delta = 0;
  EXPECT_THROW(WindowedEstimator{config}, InvalidArgument);
  config = small_config();
  config.rate_bound = 0.0;
  EXPECT_THROW(WindowedEstimator{config}, InvalidArgument);
  config = small_config();
  config.sketch_count = 0;
  EXPECT_THROW(WindowedEstimator{config}, InvalidArgument);
  config = small_config();
  config.sketch_count.reset();
  EXPECT_EQ(config.resolved_sketch_count(), required_sketch_count(config.accuracy));
}

}  // namespace
}  // namespace rainsketch
