#include "rainsketch/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "rainsketch/errors.hpp"
#include "rainsketch/oracle.hpp"

namespace rainsketch {
namespace {

// Distributions are written out by hand: the standard library ones are not
// specified bit-for-bit, and runs must reproduce across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 30.0) {
      total += knuth(30.0);
      mean -= 30.0;
    }
    return total + knuth(mean);
  }

 private:
  std::uint64_t knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform01();
    while (product > limit) {
      ++k;
      product *= uniform01();
    }
    return k;
  }

  std::mt19937_64 engine_;
};

std::string client_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%010llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  window.validate();
  if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) {
    throw InvalidArgument("arrival rate must be non-negative");
  }
  if (!(service_rate >= 0.0) || !std::isfinite(service_rate)) {
    throw InvalidArgument("service rate must be non-negative");
  }
  if (service_rate > window.rate_bound) {
    throw InvalidArgument("service rate must not exceed the rate bound R_s");
  }
  if (renewal_interval == 0) throw InvalidArgument("renewal interval must be positive");
  if (renewal_interval >= window.delta && !allow_slow_renewal) {
    throw InvalidArgument(
        "renewal interval must be shorter than delta (set allow_slow_renewal "
        "to run the failure mode)");
  }
  if (!(query_fraction >= 0.0 && query_fraction <= 1.0)) {
    throw InvalidArgument("query fraction must be in [0, 1]");
  }
  if (!(surge_rate >= 0.0) || !std::isfinite(surge_rate)) {
    throw InvalidArgument("surge rate must be non-negative");
  }
  if (duration_ticks < 2 * window.delta) {
    throw InvalidArgument("duration must cover at least two windows");
  }
}

SimResult run_simulation(const SimConfig& config) {
  config.validate();

  WindowedEstimator estimator(config.window);
  ExactWindowedCounter oracle(config.window.delta);
  ExactQueue queue;
  Rng rng(config.rng_seed);
  std::map<std::uint64_t, std::vector<std::string>> renewals_due;

  SimResult result;
  SimSummary& s = result.summary;
  s.ticks = config.duration_ticks;
  s.sketch_count = config.window.resolved_sketch_count();
  s.width = config.window.width;
  s.epsilon_n = config.window.accuracy.epsilon * config.window.capacity_hint;

  const std::uint64_t delta = config.window.delta;
  const double envelope_cap = 2.0 * static_cast<double>(delta) * config.window.rate_bound;
  std::uint64_t next_client = 0;

  const auto emit = [&](const std::string& id, Timestamp ts, Timestamp now) {
    const RainCheckEvent event{id, ts};
    estimator.observe(event, now);
    oracle.observe(event, now);
    ++s.events;
  };

  for (std::uint64_t t = 0; t < config.duration_ticks; ++t) {
    const Timestamp now{t};
    estimator.advance_to(now);
    oracle.advance_to(now);

    const bool surging = t >= config.surge_start &&
                         t - config.surge_start < config.surge_ticks;
    const auto arrivals = rng.poisson(surging ? config.surge_rate : config.arrival_rate);
    for (std::uint64_t a = 0; a < arrivals; ++a) {
      std::string id = client_name(next_client++);
      queue.enqueue(id, now);
      emit(id, now, now);
      ++s.arrivals;
      renewals_due[t + 1 + rng.below(config.renewal_interval)].push_back(std::move(id));
    }

    if (auto due = renewals_due.find(t); due != renewals_due.end()) {
      for (auto& id : due->second) {
        if (!queue.is_waiting(id)) continue;
        const Timestamp stamp = config.renewal_stamp == RenewalStamp::kOriginal
                                    ? queue.rho_of(id)
                                    : now;
        emit(id, stamp, now);
        ++s.renewals;
        renewals_due[t + config.renewal_interval].push_back(std::move(id));
      }
      renewals_due.erase(due);
    }

    s.peak_window_distinct =
        std::max<std::uint64_t>(s.peak_window_distinct, oracle.current().distinct_clients());

    if (config.query_fraction > 0.0) {
      const std::uint64_t i = estimator.window_index();
      const std::uint64_t window_start = i * delta;
      std::uint64_t position = 0;
      for (const auto& [rho, id] : queue.waiting()) {
        ++position;
        if (!rng.bernoulli(config.query_fraction)) continue;
        const auto estimate = estimator.estimate_rank(Timestamp{rho}, now);
        QueryRecord record;
        record.t_cur = t;
        record.client_id = id;
        record.rho_ts = rho;
        record.true_rank = position;
        record.exact_window_count = oracle.completed().count_at_most(Timestamp{rho});
        record.sketch_estimate = estimate.estimated_rank;
        record.error_bound = estimate.error_bound;
        record.window_index = estimate.window_index;

        const auto slack = static_cast<std::int64_t>(record.exact_window_count) -
                           static_cast<std::int64_t>(record.true_rank);
        if (i >= 1 && rho >= window_start - delta && rho < window_start) {
          ++s.envelope_queries;
          if (!s.max_envelope_slack || slack > *s.max_envelope_slack) {
            s.max_envelope_slack = slack;
          }
          if (s.envelope_queries == 1 || slack < s.min_envelope_slack) {
            s.min_envelope_slack = slack;
          }
          if (slack < 0 || static_cast<double>(slack) > envelope_cap) {
            ++s.envelope_violations;
          }
        }
        if (i >= 1 && rho < window_start) {
          ++s.rank_safety_queries;
          if (slack < 0) ++s.rank_safety_violations;
        }
        result.records.push_back(std::move(record));
      }
    }

    const auto quota = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(t + 1) * config.service_rate) -
        std::floor(static_cast<double>(t) * config.service_rate));
    for (std::uint64_t k = 0; k < quota && queue.serve_head(); ++k) ++s.served;
  }

  s.waiting_at_end = queue.waiting_count();
  s.queries = result.records.size();
  if (!result.records.empty()) {
    s.report = build_report(result.records, s.epsilon_n);
  }
  result.snapshot = estimator.serialize();
  return result;
}

nlohmann::json to_json(const SimSummary& s) {
  nlohmann::json j = {
      {"ticks", s.ticks},
      {"arrivals", s.arrivals},
      {"renewals", s.renewals},
      {"events", s.events},
      {"served", s.served},
      {"waiting_at_end", s.waiting_at_end},
      {"queries", s.queries},
      {"sketch_count", s.sketch_count},
      {"width", s.width},
      {"peak_window_distinct", s.peak_window_distinct},
      {"epsilon_n", s.epsilon_n},
      {"envelope_queries", s.envelope_queries},
      {"envelope_violations", s.envelope_violations},
      {"rank_safety_queries", s.rank_safety_queries},
      {"rank_safety_violations", s.rank_safety_violations},
  };
  j["max_envelope_slack"] = s.max_envelope_slack ? nlohmann::json(*s.max_envelope_slack)
                                                 : nlohmann::json(nullptr);
  j["min_envelope_slack"] = s.max_envelope_slack ? nlohmann::json(s.min_envelope_slack)
                                                 : nlohmann::json(nullptr);
  j["report"] = s.report ? to_json(*s.report) : nlohmann::json(nullptr);
  return j;
}

OutputPaths output_paths_for(const std::string& records_path) {
  std::filesystem::path base(records_path);
  base.replace_extension();
  return OutputPaths{records_path, base.string() + ".summary.json",
                     base.string() + ".snapshot.bin"};
}

OutputPaths write_outputs(const SimResult& result, const std::string& records_path) {
  const auto paths = output_paths_for(records_path);
  write_records_csv(paths.records, result.records);
  {
    std::ofstream out(paths.summary, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + paths.summary + " for writing");
    out << to_json(result.summary).dump(2) << '\n';
  }
  write_file(paths.snapshot, result.snapshot);
  return paths;
}

}  // namespace rainsketch
