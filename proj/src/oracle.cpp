#include "rainsketch/oracle.hpp"

#include <algorithm>
#include <iterator>

#include "rainsketch/errors.hpp"

namespace rainsketch {

void ExactWindowCounter::observe(std::string_view client_id, Timestamp ts) {
  auto it = per_client_min_.find(client_id);
  if (it == per_client_min_.end()) {
    per_client_min_.emplace(std::string(client_id), ts.tick);
  } else {
    it->second = std::min(it->second, ts.tick);
  }
}

std::size_t ExactWindowCounter::count_at_most(Timestamp x) const {
  return static_cast<std::size_t>(std::count_if(
      per_client_min_.begin(), per_client_min_.end(),
      [x](const auto& entry) { return entry.second <= x.tick; }));
}

std::optional<Timestamp> ExactWindowCounter::min_timestamp(
    std::string_view client_id) const {
  auto it = per_client_min_.find(client_id);
  if (it == per_client_min_.end()) return std::nullopt;
  return Timestamp{it->second};
}

ExactWindowedCounter::ExactWindowedCounter(std::uint64_t delta) : delta_(delta) {
  if (delta == 0) throw InvalidArgument("delta must be at least one tick");
}

void ExactWindowedCounter::observe(const RainCheckEvent& event, Timestamp now) {
  advance_to(now);
  current_.observe(event);
}

void ExactWindowedCounter::advance_to(Timestamp now) {
  if (now < now_) throw TimeRegression("oracle clock moved backwards");
  now_ = now;
  const std::uint64_t target = now.tick / delta_;
  if (target == window_index_) return;
  if (target == window_index_ + 1) {
    completed_ = std::move(current_);
  } else {
    completed_.clear();
  }
  current_.clear();
  window_index_ = target;
}

void ExactQueue::enqueue(std::string_view client_id, Timestamp rho_ts) {
  if (client_id.empty()) throw InvalidArgument("client id must be non-empty");
  if (is_waiting(client_id) || was_served(client_id)) {
    throw InvalidArgument("client " + std::string(client_id) +
                          " already joined the queue");
  }
  rho_.emplace(std::string(client_id), rho_ts.tick);
  order_.emplace(rho_ts.tick, std::string(client_id));
}

std::size_t ExactQueue::rank(std::string_view client_id) const {
  auto it = rho_.find(client_id);
  if (it == rho_.end()) {
    throw NotWaiting("client " + std::string(client_id) + " is not waiting");
  }
  const auto pos = order_.find({it->second, it->first});
  return static_cast<std::size_t>(std::distance(order_.begin(), pos)) + 1;
}

std::optional<std::string> ExactQueue::serve_head() {
  if (order_.empty()) return std::nullopt;
  auto node = order_.extract(order_.begin());
  std::string id = std::move(node.value().second);
  rho_.erase(rho_.find(id));
  served_.insert(id);
  return id;
}

bool ExactQueue::is_waiting(std::string_view client_id) const {
  return rho_.find(client_id) != rho_.end();
}

bool ExactQueue::was_served(std::string_view client_id) const {
  return served_.find(client_id) != served_.end();
}

Timestamp ExactQueue::rho_of(std::string_view client_id) const {
  auto it = rho_.find(client_id);
  if (it == rho_.end()) {
    throw NotWaiting("client " + std::string(client_id) + " is not waiting");
  }
  return Timestamp{it->second};
}

}  // namespace rainsketch
