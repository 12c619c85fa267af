#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "rainsketch/report.hpp"
#include "rainsketch/serialization.hpp"
#include "rainsketch/windowed_estimator.hpp"

namespace rainsketch {

/// Timestamp carried by the raincheck a waiting client receives on renewal.
enum class RenewalStamp {
  /// Reissued with the client's original (minimum) timestamp.
  kOriginal,
  /// Stamped with the renewal tick; the client keeps its older token, so its
  /// rho_ts is unchanged, but the server only sees the fresh value.
  kFresh,
};

struct SimConfig {
  std::uint64_t duration_ticks = 20000;
  /// Mean Poisson arrivals per tick.
  double arrival_rate = 3.0;
  /// Ticks between a waiting client's rainchecks. Must be below the window
  /// length unless `allow_slow_renewal` is set.
  std::uint64_t renewal_interval = 50;
  bool allow_slow_renewal = false;
  RenewalStamp renewal_stamp = RenewalStamp::kOriginal;
  /// Clients served per tick, at most window.rate_bound.
  double service_rate = 5.0;
  /// Probability that a waiting client queries its rank in a given tick.
  double query_fraction = 0.05;
  /// Optional overload phase: arrivals at `surge_rate` during
  /// [surge_start, surge_start + surge_ticks).
  std::uint64_t surge_start = 0;
  std::uint64_t surge_ticks = 0;
  double surge_rate = 0.0;
  WindowConfig window = default_window();
  std::uint64_t rng_seed = 1;

  void validate() const;

  static WindowConfig default_window() {
    WindowConfig w;
    w.delta = 100;
    w.rate_bound = 5.0;
    w.accuracy = AccuracyParams{0.3, 0.1, 1.0};
    w.sketch_count = 64;
    w.width = 64;
    w.capacity_hint = 1000.0;
    return w;
  }
};

struct SimSummary {
  std::uint64_t ticks = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t renewals = 0;
  std::uint64_t events = 0;
  std::uint64_t served = 0;
  std::uint64_t waiting_at_end = 0;
  std::uint64_t queries = 0;
  std::size_t sketch_count = 0;
  std::uint32_t width = 0;
  /// Largest number of distinct clients seen in one window.
  std::uint64_t peak_window_distinct = 0;
  /// eps * N from the window config.
  double epsilon_n = 0.0;
  /// Queries whose rho_ts lies inside the completed window.
  std::uint64_t envelope_queries = 0;
  /// max(exact_window_count - true_rank) over envelope queries.
  std::optional<std::int64_t> max_envelope_slack;
  std::int64_t min_envelope_slack = 0;
  /// Envelope queries outside [0, 2 * delta * R_s].
  std::uint64_t envelope_violations = 0;
  /// Queries with rho_ts before the current window, where true_rank <=
  /// exact_window_count is expected to hold.
  std::uint64_t rank_safety_queries = 0;
  std::uint64_t rank_safety_violations = 0;
  /// Present when at least one query was issued.
  std::optional<Report> report;
};

struct SimResult {
  SimSummary summary;
  std::vector<QueryRecord> records;
  /// Final estimator state in the shared snapshot format.
  Bytes snapshot;
};

/// Deterministic for a fixed config, including rng_seed.
SimResult run_simulation(const SimConfig& config);

nlohmann::json to_json(const SimSummary& summary);

/// Output paths derived from the records path: `<stem>.summary.json` and
/// `<stem>.snapshot.bin` next to the CSV.
struct OutputPaths {
  std::string records;
  std::string summary;
  std::string snapshot;
};
OutputPaths output_paths_for(const std::string& records_path);

/// Writes CSV, JSON summary and snapshot. Throws std::runtime_error when a
/// path is not writable.
OutputPaths write_outputs(const SimResult& result, const std::string& records_path);

}  // namespace rainsketch
