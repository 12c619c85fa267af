// rainsketch: workload simulator, report tool and snapshot inspector.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rainsketch/errors.hpp"
#include "rainsketch/report.hpp"
#include "rainsketch/serialization.hpp"
#include "rainsketch/simulator.hpp"
#include "rainsketch/windowed_estimator.hpp"

namespace {

using namespace rainsketch;

struct SimulateOptions {
  SimConfig config;
  std::size_t sketches = 64;
  std::string renewal_stamp = "original";
  std::string averaging = "mean-index";
  std::string out = "records.csv";
};

void print_profile(std::ostream& out, const char* label, const RankEnsemble& ensemble) {
  const auto fm = ensemble.to_fm(Timestamp::max_valid());
  out << label << " lsb0:";
  for (const auto& row : fm) out << ' ' << row.lsb0();
  out << "\n" << label << " estimate (all timestamps): "
      << format_double(ensemble_estimate(fm)) << '\n';
}

const char* kind_name(SketchKind kind) {
  switch (kind) {
    case SketchKind::kFm: return "fm";
    case SketchKind::kRank: return "rank";
    case SketchKind::kWindow: return "window";
  }
  return "unknown";
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

// Flat key=value file; keys are the simulate flag names without dashes.
// Blank lines and lines starting with '#' are ignored.
std::vector<std::string> load_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "allow-slow-renewal") {
      if (value == "true" || value == "1") args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

// Splices `simulate --config <path>` into the flags the file lists, placed
// before the explicit flags so that the command line takes precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv, argv + argc);
  std::vector<std::string> out;
  const auto sub = std::find(in.begin(), in.end(), "simulate");
  if (sub == in.end()) return in;
  out.assign(in.begin(), sub + 1);
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (auto it = sub + 1; it != in.end(); ++it) {
    if (*it == "--config" && it + 1 != in.end()) {
      from_file = load_flat_config(*++it);
    } else if (it->rfind("--config=", 0) == 0) {
      from_file = load_flat_config(it->substr(9));
    } else {
      rest.push_back(*it);
    }
  }
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

int run_simulate(SimulateOptions& opts) {
  auto& cfg = opts.config;
  if (opts.sketches == 0) {
    cfg.window.sketch_count.reset();
  } else {
    cfg.window.sketch_count = opts.sketches;
  }
  cfg.renewal_stamp = opts.renewal_stamp == "fresh" ? RenewalStamp::kFresh
                                                    : RenewalStamp::kOriginal;
  cfg.window.averaging = opts.averaging == "mean-estimate" ? Averaging::kMeanEstimate
                                                           : Averaging::kMeanIndex;
  const auto result = run_simulation(cfg);
  const auto paths = write_outputs(result, opts.out);

  const auto& s = result.summary;
  std::cout << "ticks=" << s.ticks << " arrivals=" << s.arrivals
            << " renewals=" << s.renewals << " served=" << s.served
            << " waiting=" << s.waiting_at_end << " queries=" << s.queries
            << " K=" << s.sketch_count << " W=" << s.width << '\n'
            << "peak distinct clients per window: " << s.peak_window_distinct << '\n'
            << "envelope queries: " << s.envelope_queries
            << " violations: " << s.envelope_violations;
  if (s.max_envelope_slack) std::cout << " max slack: " << *s.max_envelope_slack;
  std::cout << '\n';
  if (s.report) std::cout << format_report(*s.report);
  std::cout << "wrote " << paths.records << ", " << paths.summary << ", "
            << paths.snapshot << '\n';
  return 0;
}

int run_report(const std::string& in, double epsilon, double capacity) {
  const auto records = read_records_csv(in);
  const auto report = build_report(records, epsilon * capacity);
  std::cout << format_report(report);
  std::filesystem::path json_path(in);
  json_path.replace_extension(".report.json");
  std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + json_path.string());
  out << to_json(report).dump(2) << '\n';
  std::cout << "wrote " << json_path.string() << '\n';
  return 0;
}

int run_sketch_dump(const std::string& in) {
  const auto bytes = read_file(in);
  const auto header = read_header(bytes);
  std::cout << "magic: FMRK\nversion: " << int{header.version}
            << "\nkind: " << kind_name(header.kind) << "\nrows (K): " << header.rows
            << "\nwidth (W): " << header.width << "\nbytes: " << bytes.size() << '\n';
  switch (header.kind) {
    case SketchKind::kFm: {
      const auto ensemble = deserialize_fm(bytes);
      std::cout << "lsb0:";
      for (const auto& row : ensemble.rows()) std::cout << ' ' << row.lsb0();
      std::cout << "\nestimate: " << format_double(ensemble.estimate()) << '\n';
      break;
    }
    case SketchKind::kRank:
      print_profile(std::cout, "rows", deserialize_rank(bytes));
      break;
    case SketchKind::kWindow: {
      WindowConfig config;
      config.sketch_count = header.rows;
      config.width = header.width;
      detail::ByteReader reader(bytes);
      reader.skip(kSnapshotHeaderSize);
      const auto index = reader.u64();
      const auto now = reader.u64();
      const auto completed = reader.rank_body(header.rows, header.width);
      const auto current = reader.rank_body(header.rows, header.width);
      reader.expect_end();
      std::cout << "window index: " << index << "\nnow: " << now << '\n';
      print_profile(std::cout, "completed", completed);
      print_profile(std::cout, "current", current);
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distinct-count-below-threshold sketches and virtual queue simulator"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the raincheck workload simulator");
  simulate->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  simulate->add_option("--config", config_path, "Flat key=value config file");
  auto& cfg = sim.config;
  simulate->add_option("--delta", cfg.window.delta, "Window length in ticks")->capture_default_str();
  simulate->add_option("--rs", cfg.window.rate_bound, "Rate bound R_s (rainchecks/tick)")->capture_default_str();
  simulate->add_option("--epsilon", cfg.window.accuracy.epsilon, "Accuracy epsilon")->capture_default_str();
  simulate->add_option("--delta-prob", cfg.window.accuracy.delta, "Failure probability delta")->capture_default_str();
  simulate->add_option("--constant-c", cfg.window.accuracy.constant_c, "Multiplier in the sketch-count formula")->capture_default_str();
  simulate->add_option("--sketches", sim.sketches, "Ensemble size K (0 = derive from epsilon/delta)")->capture_default_str();
  simulate->add_option("--width", cfg.window.width, "Positions per row W")->capture_default_str();
  simulate->add_option("--capacity", cfg.window.capacity_hint, "Capacity hint N for eps*N")->capture_default_str();
  simulate->add_option("--averaging", sim.averaging, "mean-index or mean-estimate")
      ->check(CLI::IsMember({"mean-index", "mean-estimate"}))->capture_default_str();
  simulate->add_option("--arrival-rate", cfg.arrival_rate, "Poisson arrivals per tick")->capture_default_str();
  simulate->add_option("--service-rate", cfg.service_rate, "Clients served per tick")->capture_default_str();
  simulate->add_option("--renewal", cfg.renewal_interval, "Ticks between renewals")->capture_default_str();
  simulate->add_option("--renewal-stamp", sim.renewal_stamp, "original or fresh")
      ->check(CLI::IsMember({"original", "fresh"}))->capture_default_str();
  simulate->add_flag("--allow-slow-renewal", cfg.allow_slow_renewal, "Permit renewal >= delta");
  simulate->add_option("--query-fraction", cfg.query_fraction, "Per-tick query probability")->capture_default_str();
  simulate->add_option("--surge-start", cfg.surge_start, "First tick of the overload phase")->capture_default_str();
  simulate->add_option("--surge-ticks", cfg.surge_ticks, "Length of the overload phase")->capture_default_str();
  simulate->add_option("--surge-rate", cfg.surge_rate, "Arrival rate during the overload phase")->capture_default_str();
  simulate->add_option("--ticks", cfg.duration_ticks, "Simulation length")->capture_default_str();
  simulate->add_option("--seed", cfg.rng_seed, "RNG seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Records CSV path")->capture_default_str();

  std::string report_in;
  double report_epsilon = 0.3;
  double report_capacity = 1000.0;
  auto* report = app.add_subcommand("report", "Summarize a records CSV");
  report->add_option("--in", report_in, "Records CSV")->required();
  report->add_option("--epsilon", report_epsilon, "Epsilon for coverage")->capture_default_str();
  report->add_option("--capacity", report_capacity, "Capacity hint N for coverage")->capture_default_str();

  std::string dump_in;
  auto* dump = app.add_subcommand("sketch-dump", "Print a snapshot header and lsb0 profile");
  dump->add_option("--in", dump_in, "Snapshot file")->required();

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::vector<char*> expanded;
  for (auto& arg : args) expanded.push_back(arg.data());
  try {
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (report->parsed()) return run_report(report_in, report_epsilon, report_capacity);
    if (dump->parsed()) return run_sketch_dump(dump_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
