#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "rainsketch/fm_sketch.hpp"
#include "rainsketch/rank_sketch.hpp"
#include "rainsketch/serialization.hpp"
#include "rainsketch/types.hpp"

namespace rainsketch {

struct WindowConfig {
  /// Window length in ticks. Windows are the half-open intervals
  /// [i*delta, (i+1)*delta).
  std::uint64_t delta = 100;
  /// Maximum raincheck rate R_s, in rainchecks per tick.
  double rate_bound = 5.0;
  AccuracyParams accuracy{};
  std::uint32_t width = kDefaultWidth;
  /// Distinct-client scale N used to report the eps*N term. Not observed;
  /// reported bounds are conditional on it.
  double capacity_hint = 1000.0;
  /// Explicit ensemble size; when unset it is derived from `accuracy`.
  std::optional<std::size_t> sketch_count;
  std::uint64_t base_seed = 0x7261696e736b6574ULL;
  Averaging averaging = Averaging::kMeanIndex;

  void validate() const;
  std::size_t resolved_sketch_count() const;
};

/// eps*N + (t_cur - (i-1)*delta) * R_s. Throws InvalidArgument when
/// t_cur < (i-1)*delta.
double window_error_bound(const WindowConfig& config, Timestamp t_cur,
                          std::uint64_t window_index);

struct RankEstimate {
  double estimated_rank = 0.0;
  double error_bound = 0.0;
  std::uint64_t window_index = 0;
  Timestamp queried_ts;
};

/// The frozen sketch for [(i-1)*delta, i*delta) together with i.
struct CompletedWindow {
  RankEnsemble sketch;
  std::uint64_t window_index = 0;
};

/// Double-buffered rank sketches. Events land in the window that is filling;
/// queries run against the last completed window.
///
/// One writer calls observe()/advance_to() in time order. Readers may call
/// estimate_rank() or snapshot() concurrently: the completed window and its
/// index are published together as one immutable object.
class WindowedEstimator {
 public:
  explicit WindowedEstimator(WindowConfig config);

  WindowedEstimator(WindowedEstimator&& other) noexcept;
  WindowedEstimator& operator=(WindowedEstimator&& other) noexcept;
  WindowedEstimator(const WindowedEstimator&) = delete;
  WindowedEstimator& operator=(const WindowedEstimator&) = delete;

  /// Rotates up to `now`, then records the event in the filling window.
  /// Throws TimeRegression if `now` is behind the clock and InvalidArgument
  /// for an invalid event or one stamped after `now`.
  void observe(const RainCheckEvent& event, Timestamp now);

  /// Rotates windows until `now` falls in the filling one. If more than one
  /// boundary is crossed the completed window is empty.
  void advance_to(Timestamp now);

  /// Upper-bound rank estimate for a client whose smallest valid raincheck
  /// carries `rho_ts`. Throws StaleWindow unless t_cur lies in the current
  /// window.
  RankEstimate estimate_rank(Timestamp rho_ts, Timestamp t_cur) const;

  std::shared_ptr<const CompletedWindow> snapshot() const;

  const WindowConfig& config() const noexcept { return config_; }
  const RankEnsemble& current() const noexcept { return current_; }
  std::uint64_t window_index() const noexcept { return window_index_; }
  Timestamp now() const noexcept { return now_; }

  /// Snapshot in the shared binary format (kind 2).
  Bytes serialize() const;

  /// Restores a state written by serialize(). K and W must agree with
  /// `config`; seeds are taken from the snapshot.
  static WindowedEstimator deserialize(WindowConfig config,
                                       std::span<const std::uint8_t> bytes);

 private:
  WindowConfig config_;
  RankEnsemble current_;
  std::uint64_t window_index_ = 0;
  Timestamp now_{0};

  mutable std::mutex publish_mu_;
  std::shared_ptr<const CompletedWindow> completed_;
};

/// Rank estimate against an explicit completed window.
RankEstimate estimate_rank(const WindowConfig& config,
                           const CompletedWindow& completed, Timestamp rho_ts,
                           Timestamp t_cur);

}  // namespace rainsketch
