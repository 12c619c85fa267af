#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "rainsketch/types.hpp"

namespace rainsketch {

/// Exact per-client minimum timestamps for one interval. Memory is linear in
/// the number of clients; this is the state the sketches avoid keeping.
class ExactWindowCounter {
 public:
  void observe(std::string_view client_id, Timestamp ts);
  void observe(const RainCheckEvent& event) { observe(event.client_id, event.ts); }

  /// |{c : min_ts(c) <= x}|
  std::size_t count_at_most(Timestamp x) const;

  std::size_t distinct_clients() const noexcept { return per_client_min_.size(); }
  std::optional<Timestamp> min_timestamp(std::string_view client_id) const;
  void clear() noexcept { per_client_min_.clear(); }

  const std::map<std::string, std::uint64_t, std::less<>>& per_client_min() const noexcept {
    return per_client_min_;
  }

 private:
  std::map<std::string, std::uint64_t, std::less<>> per_client_min_;
};

/// Exact twin of the windowed estimator's rotation: a filling counter for the
/// current window and a frozen one for the previous window.
class ExactWindowedCounter {
 public:
  explicit ExactWindowedCounter(std::uint64_t delta);

  void observe(const RainCheckEvent& event, Timestamp now);
  void advance_to(Timestamp now);

  const ExactWindowCounter& completed() const noexcept { return completed_; }
  const ExactWindowCounter& current() const noexcept { return current_; }
  std::uint64_t window_index() const noexcept { return window_index_; }

 private:
  std::uint64_t delta_;
  std::uint64_t window_index_ = 0;
  Timestamp now_{0};
  ExactWindowCounter current_;
  ExactWindowCounter completed_;
};

/// FCFS virtual queue ordered by (rho_ts, client id bytes). Ranks are 1-based.
class ExactQueue {
 public:
  /// Throws InvalidArgument if the client is already waiting or was served.
  void enqueue(std::string_view client_id, Timestamp rho_ts);

  /// 1 + number of waiting clients strictly ahead. Throws NotWaiting.
  std::size_t rank(std::string_view client_id) const;

  /// Removes and returns the head of the queue, if any.
  std::optional<std::string> serve_head();

  bool is_waiting(std::string_view client_id) const;
  bool was_served(std::string_view client_id) const;
  Timestamp rho_of(std::string_view client_id) const;

  std::size_t waiting_count() const noexcept { return order_.size(); }
  std::size_t served_count() const noexcept { return served_.size(); }

  /// Waiting clients in queue order.
  const std::set<std::pair<std::uint64_t, std::string>>& waiting() const noexcept {
    return order_;
  }

 private:
  std::set<std::pair<std::uint64_t, std::string>> order_;
  std::map<std::string, std::uint64_t, std::less<>> rho_;
  std::set<std::string, std::less<>> served_;
};

}  // namespace rainsketch
