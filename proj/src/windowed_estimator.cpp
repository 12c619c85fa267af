#include "rainsketch/windowed_estimator.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rainsketch/errors.hpp"
#include "rainsketch/hashing.hpp"

namespace rainsketch {
namespace {

WindowConfig validated(WindowConfig config) {
  config.validate();
  return config;
}

}  // namespace

void WindowConfig::validate() const {
  if (delta < 1) throw InvalidArgument("delta must be at least one tick");
  if (!(rate_bound > 0.0) || !std::isfinite(rate_bound)) {
    throw InvalidArgument("rate bound R_s must be positive");
  }
  accuracy.validate();
  validate_width(width);
  if (!(capacity_hint >= 0.0) || !std::isfinite(capacity_hint)) {
    throw InvalidArgument("capacity hint must be non-negative");
  }
  if (sketch_count && *sketch_count == 0) {
    throw InvalidArgument("sketch count must be at least 1");
  }
}

std::size_t WindowConfig::resolved_sketch_count() const {
  return sketch_count ? *sketch_count : required_sketch_count(accuracy);
}

double window_error_bound(const WindowConfig& config, Timestamp t_cur,
                          std::uint64_t window_index) {
  // (i-1)*delta <= t_cur  <=>  i*delta <= t_cur + delta
  const std::uint64_t reach = t_cur.tick + config.delta;
  const std::uint64_t start = window_index * config.delta;
  if (reach < start) {
    throw InvalidArgument("t_cur precedes the completed window");
  }
  const auto elapsed = static_cast<double>(reach - start);
  return config.accuracy.epsilon * config.capacity_hint +
         elapsed * config.rate_bound;
}

RankEstimate estimate_rank(const WindowConfig& config,
                           const CompletedWindow& completed, Timestamp rho_ts,
                           Timestamp t_cur) {
  const std::uint64_t i = completed.window_index;
  if (t_cur.tick / config.delta != i) {
    throw StaleWindow("t_cur " + std::to_string(t_cur.tick) +
                      " is outside window " + std::to_string(i));
  }
  RankEstimate estimate;
  estimate.estimated_rank = completed.sketch.count_at_most(rho_ts, config.averaging);
  estimate.error_bound = window_error_bound(config, t_cur, i);
  estimate.window_index = i;
  estimate.queried_ts = rho_ts;
  return estimate;
}

WindowedEstimator::WindowedEstimator(WindowConfig config)
    : config_(validated(std::move(config))),
      current_(RankEnsemble::seeded(config_.base_seed,
                                    config_.resolved_sketch_count(),
                                    config_.width)) {
  completed_ = std::make_shared<const CompletedWindow>(
      CompletedWindow{current_.empty_copy(), 0});
}

WindowedEstimator::WindowedEstimator(WindowedEstimator&& other) noexcept
    : config_(std::move(other.config_)),
      current_(std::move(other.current_)),
      window_index_(other.window_index_),
      now_(other.now_),
      completed_(other.snapshot()) {}

WindowedEstimator& WindowedEstimator::operator=(
    WindowedEstimator&& other) noexcept {
  if (this != &other) {
    auto completed = other.snapshot();
    config_ = std::move(other.config_);
    current_ = std::move(other.current_);
    window_index_ = other.window_index_;
    now_ = other.now_;
    std::lock_guard lock(publish_mu_);
    completed_ = std::move(completed);
  }
  return *this;
}

void WindowedEstimator::observe(const RainCheckEvent& event, Timestamp now) {
  if (event.ts.is_empty()) {
    throw InvalidArgument("the empty-slot sentinel is not a valid timestamp");
  }
  if (event.ts > now) {
    throw InvalidArgument("event timestamp " + std::to_string(event.ts.tick) +
                          " is ahead of now " + std::to_string(now.tick));
  }
  advance_to(now);
  current_.insert(event);
}

void WindowedEstimator::advance_to(Timestamp now) {
  if (now < now_) {
    throw TimeRegression("clock moved backwards from " +
                         std::to_string(now_.tick) + " to " +
                         std::to_string(now.tick));
  }
  now_ = now;
  const std::uint64_t target = now.tick / config_.delta;
  if (target == window_index_) return;

  RankEnsemble fresh = current_.empty_copy();
  std::shared_ptr<const CompletedWindow> next;
  if (target == window_index_ + 1) {
    next = std::make_shared<const CompletedWindow>(
        CompletedWindow{std::exchange(current_, std::move(fresh)), target});
  } else {
    // Idle gap: the window right before `target` saw no events.
    next = std::make_shared<const CompletedWindow>(
        CompletedWindow{fresh, target});
    current_ = std::move(fresh);
  }
  window_index_ = target;
  std::lock_guard lock(publish_mu_);
  completed_ = std::move(next);
}

RankEstimate WindowedEstimator::estimate_rank(Timestamp rho_ts,
                                              Timestamp t_cur) const {
  return rainsketch::estimate_rank(config_, *snapshot(), rho_ts, t_cur);
}

std::shared_ptr<const CompletedWindow> WindowedEstimator::snapshot() const {
  std::lock_guard lock(publish_mu_);
  return completed_;
}

Bytes WindowedEstimator::serialize() const {
  const auto completed = snapshot();
  detail::ByteWriter writer;
  writer.header(SketchKind::kWindow, static_cast<std::uint32_t>(current_.size()),
                current_.width());
  writer.u64(window_index_);
  writer.u64(now_.tick);
  writer.rank_body(completed->sketch);
  writer.rank_body(current_);
  return std::move(writer).take();
}

WindowedEstimator WindowedEstimator::deserialize(
    WindowConfig config, std::span<const std::uint8_t> bytes) {
  const auto header = read_header(bytes);
  if (header.kind != SketchKind::kWindow) {
    throw FormatError("snapshot is not a window state");
  }
  if (header.rows != config.resolved_sketch_count() ||
      header.width != config.width) {
    throw IncompatibleSketch("snapshot dimensions do not match the config");
  }
  detail::ByteReader reader(bytes);
  reader.skip(kSnapshotHeaderSize);
  const std::uint64_t index = reader.u64();
  const Timestamp now{reader.u64()};
  auto completed = reader.rank_body(header.rows, header.width);
  auto current = reader.rank_body(header.rows, header.width);
  reader.expect_end();
  if (completed.seeds() != current.seeds()) {
    throw FormatError("window snapshot ensembles disagree on seeds");
  }
  if (now.tick / config.delta != index) {
    throw FormatError("window index does not match the stored clock");
  }

  WindowedEstimator estimator(std::move(config));
  estimator.current_ = std::move(current);
  estimator.window_index_ = index;
  estimator.now_ = now;
  estimator.completed_ = std::make_shared<const CompletedWindow>(
      CompletedWindow{std::move(completed), index});
  return estimator;
}

}  // namespace rainsketch
