#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

namespace rainsketch {

/// One rank query issued during a simulation run.
struct QueryRecord {
  std::uint64_t t_cur = 0;
  std::string client_id;
  std::uint64_t rho_ts = 0;
  std::uint64_t true_rank = 0;
  std::uint64_t exact_window_count = 0;
  double sketch_estimate = 0.0;
  double error_bound = 0.0;
  std::uint64_t window_index = 0;

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

inline constexpr const char* kRecordsSchema = "rainsketch.query_records.v1";

/// Writes the versioned CSV: a `#schema=` line, a header row, then one row
/// per record. Doubles use the shortest round-trip representation.
void write_records_csv(std::ostream& out, std::span<const QueryRecord> records);
void write_records_csv(const std::string& path, std::span<const QueryRecord> records);

/// Parses CSV written by write_records_csv. Throws std::runtime_error on a
/// schema or column mismatch.
std::vector<QueryRecord> read_records_csv(std::istream& in);
std::vector<QueryRecord> read_records_csv(const std::string& path);

struct Percentiles {
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value.
double percentile(std::vector<double> values, double q);
Percentiles summarize(std::span<const double> values);

struct Report {
  std::size_t rows = 0;
  /// |sketch_estimate - exact_window_count|
  Percentiles estimate_error;
  /// exact_window_count - true_rank (signed)
  Percentiles window_slack;
  /// Absolute tolerance eps*N that `coverage` is measured against.
  double tolerance = 0.0;
  /// Fraction of rows with |sketch_estimate - exact_window_count| < tolerance.
  double coverage = 0.0;
};

/// Throws EmptyReport when `records` is empty.
Report build_report(std::span<const QueryRecord> records, double tolerance);

nlohmann::json to_json(const Percentiles& p);
nlohmann::json to_json(const Report& report);
std::string format_report(const Report& report);

/// Shortest round-trip decimal form of `value`.
std::string format_double(double value);

}  // namespace rainsketch
