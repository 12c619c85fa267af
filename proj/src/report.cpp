#include "rainsketch/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rainsketch/errors.hpp"

namespace rainsketch {
namespace {

constexpr const char* kHeader =
    "t_cur,client_id,rho_ts,true_rank,exact_window_count,sketch_estimate,"
    "error_bound,window_index";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

void write_records_csv(std::ostream& out, std::span<const QueryRecord> records) {
  out << "#schema=" << kRecordsSchema << '\n' << kHeader << '\n';
  for (const auto& r : records) {
    out << r.t_cur << ',' << r.client_id << ',' << r.rho_ts << ','
        << r.true_rank << ',' << r.exact_window_count << ','
        << format_double(r.sketch_estimate) << ','
        << format_double(r.error_bound) << ',' << r.window_index << '\n';
  }
}

void write_records_csv(const std::string& path,
                       std::span<const QueryRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_records_csv(out, records);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<QueryRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("#schema=") + kRecordsSchema) {
    throw std::runtime_error("missing or unsupported records schema line");
  }
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("unexpected records header row");
  }
  std::vector<QueryRecord> records;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 8 columns");
    }
    QueryRecord r;
    r.t_cur = parse_number<std::uint64_t>(f[0], line_no);
    r.client_id = f[1];
    r.rho_ts = parse_number<std::uint64_t>(f[2], line_no);
    r.true_rank = parse_number<std::uint64_t>(f[3], line_no);
    r.exact_window_count = parse_number<std::uint64_t>(f[4], line_no);
    r.sketch_estimate = parse_number<double>(f[5], line_no);
    r.error_bound = parse_number<double>(f[6], line_no);
    r.window_index = parse_number<std::uint64_t>(f[7], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<QueryRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_records_csv(in);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyReport("percentile of an empty sample");
  if (!(q > 0.0 && q <= 100.0)) throw InvalidArgument("percentile must be in (0, 100]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

Percentiles summarize(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  Percentiles p;
  p.p50 = percentile(v, 50.0);
  p.p90 = percentile(v, 90.0);
  p.p99 = percentile(v, 99.0);
  p.max = percentile(std::move(v), 100.0);
  return p;
}

Report build_report(std::span<const QueryRecord> records, double tolerance) {
  if (records.empty()) throw EmptyReport("no query records to report on");
  std::vector<double> errors;
  std::vector<double> slack;
  errors.reserve(records.size());
  slack.reserve(records.size());
  std::size_t covered = 0;
  for (const auto& r : records) {
    const double err = std::abs(r.sketch_estimate -
                                static_cast<double>(r.exact_window_count));
    errors.push_back(err);
    slack.push_back(static_cast<double>(r.exact_window_count) -
                    static_cast<double>(r.true_rank));
    if (err < tolerance) ++covered;
  }
  Report report;
  report.rows = records.size();
  report.estimate_error = summarize(errors);
  report.window_slack = summarize(slack);
  report.tolerance = tolerance;
  report.coverage = static_cast<double>(covered) / static_cast<double>(records.size());
  return report;
}

nlohmann::json to_json(const Percentiles& p) {
  return {{"p50", p.p50}, {"p90", p.p90}, {"p99", p.p99}, {"max", p.max}};
}

nlohmann::json to_json(const Report& report) {
  return {
      {"rows", report.rows},
      {"estimate_error", to_json(report.estimate_error)},
      {"window_slack", to_json(report.window_slack)},
      {"tolerance", report.tolerance},
      {"coverage", report.coverage},
  };
}

std::string format_report(const Report& report) {
  std::ostringstream out;
  const auto line = [&out](const char* name, const Percentiles& p) {
    out << name << ": p50=" << format_double(p.p50)
        << " p90=" << format_double(p.p90) << " p99=" << format_double(p.p99)
        << " max=" << format_double(p.max) << '\n';
  };
  out << "queries: " << report.rows << '\n';
  line("|estimate - exact_window_count|", report.estimate_error);
  line("exact_window_count - true_rank", report.window_slack);
  out << "coverage (|estimate - exact| < " << format_double(report.tolerance)
      << "): " << format_double(report.coverage) << '\n';
  return out.str();
}

}  // namespace rainsketch
