#include "rainsketch/oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "rainsketch/errors.hpp"
#include "test_util.hpp"

namespace rainsketch {
namespace {

// Second, independent implementation: rescan the raw event list.
std::size_t naive_count(const std::vector<RainCheckEvent>& events, Timestamp x) {
  std::set<std::string> clients;
  for (const auto& e : events) {
    if (e.ts <= x) clients.insert(e.client_id);
  }
  return clients.size();
}

TEST(ExactWindowCounter, Basics) {
  ExactWindowCounter counter;
  EXPECT_EQ(counter.count_at_most(Timestamp{100}), 0u);
  counter.observe("a", Timestamp{5});
  counter.observe("b", Timestamp{7});
  EXPECT_EQ(counter.count_at_most(Timestamp{6}), 1u);
  counter.observe("b", Timestamp{3});
  EXPECT_EQ(counter.count_at_most(Timestamp{6}), 2u);
  EXPECT_EQ(counter.min_timestamp("b"), Timestamp{3});
  EXPECT_FALSE(counter.min_timestamp("z"));
}

TEST(ExactWindowCounter, AgreesWithNaiveRescan) {
  std::mt19937_64 rng(2718);
  for (int stream = 0; stream < 1000; ++stream) {
    const auto events = testing::random_stream(rng, 1 + rng() % 60, 1 + rng() % 20, 40);
    ExactWindowCounter counter;
    for (const auto& e : events) counter.observe(e);
    std::set<Timestamp> thresholds;
    for (const auto& e : events) thresholds.insert(e.ts);
    for (const auto x : thresholds) {
      ASSERT_EQ(counter.count_at_most(x), naive_count(events, x)) << "stream " << stream;
    }
  }
}

TEST(ExactWindowedCounter, RotatesLikeTheEstimator) {
  ExactWindowedCounter windows(100);
  windows.observe({"a", Timestamp{99}}, Timestamp{99});
  windows.observe({"b", Timestamp{100}}, Timestamp{100});
  EXPECT_EQ(windows.window_index(), 1u);
  EXPECT_EQ(windows.completed().distinct_clients(), 1u);
  EXPECT_TRUE(windows.completed().min_timestamp("a"));
  EXPECT_TRUE(windows.current().min_timestamp("b"));
  windows.advance_to(Timestamp{350});
  EXPECT_EQ(windows.window_index(), 3u);
  EXPECT_EQ(windows.completed().distinct_clients(), 0u);
  EXPECT_THROW(windows.advance_to(Timestamp{349}), TimeRegression);
}

TEST(ExactQueue, SoleClientHasRankOne) {
  ExactQueue queue;
  queue.enqueue("solo", Timestamp{4});
  EXPECT_EQ(queue.rank("solo"), 1u);
}

TEST(ExactQueue, OrdersByTimestamp) {
  ExactQueue queue;
  queue.enqueue("late", Timestamp{9});
  queue.enqueue("first", Timestamp{3});
  queue.enqueue("middle", Timestamp{5});
  EXPECT_EQ(queue.rank("first"), 1u);
  EXPECT_EQ(queue.rank("middle"), 2u);
  EXPECT_EQ(queue.rank("late"), 3u);
}

TEST(ExactQueue, TiesBreakByClientIdBytes) {
  ExactQueue queue;
  queue.enqueue("b", Timestamp{1});
  queue.enqueue("a", Timestamp{1});
  queue.enqueue("B", Timestamp{1});
  EXPECT_EQ(queue.rank("B"), 1u);
  EXPECT_EQ(queue.rank("a"), 2u);
  EXPECT_EQ(queue.rank("b"), 3u);
}

TEST(ExactQueue, ServingAndErrors) {
  ExactQueue queue;
  queue.enqueue("x", Timestamp{1});
  queue.enqueue("y", Timestamp{2});
  EXPECT_EQ(queue.serve_head(), "x");
  EXPECT_EQ(queue.rank("y"), 1u);
  EXPECT_THROW(queue.rank("x"), NotWaiting);
  EXPECT_THROW(queue.rank("nobody"), NotWaiting);
  EXPECT_THROW(queue.enqueue("x", Timestamp{5}), InvalidArgument);
  EXPECT_THROW(queue.enqueue("y", Timestamp{5}), InvalidArgument);
  EXPECT_TRUE(queue.was_served("x"));
  EXPECT_EQ(queue.served_count(), 1u);
  EXPECT_EQ(queue.serve_head(), "y");
  EXPECT_FALSE(queue.serve_head());
}

TEST(ExactQueue, RankMatchesIterationOrder) {
  std::mt19937_64 rng(4);
  ExactQueue queue;
  for (int i = 0; i < 300; ++i) queue.enqueue(testing::random_id(rng), Timestamp{rng() % 50});
  for (int i = 0; i < 40; ++i) queue.serve_head();
  std::size_t position = 0;
  for (const auto& [rho, id] : queue.waiting()) {
    ASSERT_EQ(queue.rank(id), ++position);
    ASSERT_EQ(queue.rho_of(id), Timestamp{rho});
  }
}

}  // namespace
}  // namespace rainsketch
