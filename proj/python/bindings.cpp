#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rainsketch/errors.hpp"
#include "rainsketch/fm_sketch.hpp"
#include "rainsketch/hashing.hpp"
#include "rainsketch/rank_sketch.hpp"
#include "rainsketch/serialization.hpp"
#include "rainsketch/simulator.hpp"
#include "rainsketch/windowed_estimator.hpp"

namespace py = pybind11;
using namespace rainsketch;

namespace {

py::bytes to_bytes(const Bytes& bytes) {
  return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

Bytes from_bytes(const py::bytes& data) {
  const std::string raw = data;
  return Bytes(raw.begin(), raw.end());
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict record_to_dict(const QueryRecord& r) {
  py::dict d;
  d["t_cur"] = r.t_cur;
  d["client_id"] = r.client_id;
  d["rho_ts"] = r.rho_ts;
  d["true_rank"] = r.true_rank;
  d["exact_window_count"] = r.exact_window_count;
  d["sketch_estimate"] = r.sketch_estimate;
  d["error_bound"] = r.error_bound;
  d["window_index"] = r.window_index;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rank-estimation sketches and virtual queue simulator";

  py::register_exception<IncompatibleSketch>(m, "IncompatibleSketch");
  py::register_exception<TimeRegression>(m, "TimeRegression");
  py::register_exception<StaleWindow>(m, "StaleWindow");
  py::register_exception<NotWaiting>(m, "NotWaiting", PyExc_LookupError);
  py::register_exception<EmptyReport>(m, "EmptyReport");
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::enum_<Averaging>(m, "Averaging")
      .value("MEAN_INDEX", Averaging::kMeanIndex)
      .value("MEAN_ESTIMATE", Averaging::kMeanEstimate);

  py::enum_<RenewalStamp>(m, "RenewalStamp")
      .value("ORIGINAL", RenewalStamp::kOriginal)
      .value("FRESH", RenewalStamp::kFresh);

  m.def("hash_bytes", [](const py::bytes& data, std::uint64_t seed) {
    return hash_bytes(std::string(data), HashSeed{seed});
  }, py::arg("data"), py::arg("seed"));
  m.def("position_of", [](const std::string& client_id, std::uint64_t seed, std::uint32_t width) {
    return position_of(client_id, HashSeed{seed}, width).index;
  }, py::arg("client_id"), py::arg("seed"), py::arg("width") = kDefaultWidth);
  m.def("required_sketch_count", [](double epsilon, double delta, double constant_c) {
    return required_sketch_count({epsilon, delta, constant_c});
  }, py::arg("epsilon"), py::arg("delta"), py::arg("constant_c") = 1.0);

  py::class_<FmSketch>(m, "FmSketch")
      .def(py::init<std::uint32_t>(), py::arg("width") = kDefaultWidth)
      .def_static("from_bits", &FmSketch::from_bits, py::arg("bits"), py::arg("width") = kDefaultWidth)
      .def("insert", [](FmSketch& s, const std::string& id, std::uint64_t seed) {
        s.insert(id, HashSeed{seed});
      }, py::arg("client_id"), py::arg("seed"))
      .def("lsb0", &FmSketch::lsb0)
      .def("estimate", &FmSketch::estimate)
      .def("merge", &FmSketch::merge)
      .def("reset", &FmSketch::reset)
      .def_property_readonly("bits", &FmSketch::bits)
      .def_property_readonly("width", &FmSketch::width)
      .def_property_readonly("empty", &FmSketch::empty)
      .def(py::self == py::self)
      .def("__repr__", [](const FmSketch& s) {
        return "FmSketch(width=" + std::to_string(s.width()) + ", lsb0=" + std::to_string(s.lsb0()) + ")";
      });

  py::class_<FmEnsemble>(m, "FmEnsemble")
      .def(py::init([](std::uint64_t base_seed, std::size_t rows, std::uint32_t width) {
        return FmEnsemble::seeded(base_seed, rows, width);
      }), py::arg("base_seed"), py::arg("rows"), py::arg("width") = kDefaultWidth)
      .def("insert", [](FmEnsemble& e, const std::string& id) { e.insert(id); }, py::arg("client_id"))
      .def("estimate", &FmEnsemble::estimate, py::arg("averaging") = Averaging::kMeanIndex)
      .def("merge", &FmEnsemble::merge)
      .def("lsb0", [](const FmEnsemble& e) {
        std::vector<std::uint32_t> out;
        for (const auto& row : e.rows()) out.push_back(row.lsb0());
        return out;
      })
      .def_property_readonly("rows", &FmEnsemble::size)
      .def_property_readonly("width", &FmEnsemble::width)
      .def("serialize", [](const FmEnsemble& e) { return to_bytes(serialize(e)); })
      .def_static("deserialize", [](const py::bytes& b) { return deserialize_fm(from_bytes(b)); })
      .def(py::self == py::self);

  py::class_<RankEnsemble>(m, "RankEnsemble")
      .def(py::init([](std::uint64_t base_seed, std::size_t rows, std::uint32_t width) {
        return RankEnsemble::seeded(base_seed, rows, width);
      }), py::arg("base_seed"), py::arg("rows"), py::arg("width") = kDefaultWidth)
      .def("insert", [](RankEnsemble& e, const std::string& id, std::uint64_t ts) {
        e.insert(id, Timestamp{ts});
      }, py::arg("client_id"), py::arg("ts"))
      .def("count_at_most", [](const RankEnsemble& e, std::uint64_t x, Averaging averaging) {
        return e.count_at_most(Timestamp{x}, averaging);
      }, py::arg("x"), py::arg("averaging") = Averaging::kMeanIndex)
      .def("to_fm", [](const RankEnsemble& e, std::uint64_t x) { return e.to_fm(Timestamp{x}); },
           py::arg("x"))
      .def("merge", &RankEnsemble::merge)
      .def("reset", &RankEnsemble::reset)
      .def_property_readonly("seeds", [](const RankEnsemble& e) {
        std::vector<std::uint64_t> out;
        for (const auto s : e.seeds()) out.push_back(s.value);
        return out;
      })
      .def_property_readonly("rows", &RankEnsemble::size)
      .def_property_readonly("width", &RankEnsemble::width)
      .def("serialize", [](const RankEnsemble& e) { return to_bytes(serialize(e)); })
      .def_static("deserialize", [](const py::bytes& b) { return deserialize_rank(from_bytes(b)); })
      .def(py::self == py::self);

  py::class_<WindowConfig>(m, "WindowConfig")
      .def(py::init<>())
      .def_readwrite("delta", &WindowConfig::delta)
      .def_readwrite("rate_bound", &WindowConfig::rate_bound)
      .def_property("epsilon",
                    [](const WindowConfig& c) { return c.accuracy.epsilon; },
                    [](WindowConfig& c, double v) { c.accuracy.epsilon = v; })
      .def_property("delta_prob",
                    [](const WindowConfig& c) { return c.accuracy.delta; },
                    [](WindowConfig& c, double v) { c.accuracy.delta = v; })
      .def_property("constant_c",
                    [](const WindowConfig& c) { return c.accuracy.constant_c; },
                    [](WindowConfig& c, double v) { c.accuracy.constant_c = v; })
      .def_readwrite("width", &WindowConfig::width)
      .def_readwrite("capacity_hint", &WindowConfig::capacity_hint)
      .def_readwrite("sketch_count", &WindowConfig::sketch_count)
      .def_readwrite("base_seed", &WindowConfig::base_seed)
      .def_readwrite("averaging", &WindowConfig::averaging)
      .def("resolved_sketch_count", &WindowConfig::resolved_sketch_count);

  m.def("window_error_bound", [](const WindowConfig& c, std::uint64_t t_cur, std::uint64_t i) {
    return window_error_bound(c, Timestamp{t_cur}, i);
  }, py::arg("config"), py::arg("t_cur"), py::arg("window_index"));

  py::class_<RankEstimate>(m, "RankEstimate")
      .def_readonly("estimated_rank", &RankEstimate::estimated_rank)
      .def_readonly("error_bound", &RankEstimate::error_bound)
      .def_readonly("window_index", &RankEstimate::window_index)
      .def_property_readonly("queried_ts", [](const RankEstimate& e) { return e.queried_ts.tick; });

  py::class_<WindowedEstimator>(m, "WindowedEstimator")
      .def(py::init<WindowConfig>(), py::arg("config"))
      .def("observe", [](WindowedEstimator& w, const std::string& id, std::uint64_t ts, std::uint64_t now) {
        w.observe({id, Timestamp{ts}}, Timestamp{now});
      }, py::arg("client_id"), py::arg("ts"), py::arg("now"))
      .def("advance_to", [](WindowedEstimator& w, std::uint64_t now) { w.advance_to(Timestamp{now}); },
           py::arg("now"))
      .def("estimate_rank", [](const WindowedEstimator& w, std::uint64_t rho_ts, std::uint64_t t_cur) {
        return w.estimate_rank(Timestamp{rho_ts}, Timestamp{t_cur});
      }, py::arg("rho_ts"), py::arg("t_cur"))
      .def_property_readonly("window_index", &WindowedEstimator::window_index)
      .def_property_readonly("now", [](const WindowedEstimator& w) { return w.now().tick; })
      .def("serialize", [](const WindowedEstimator& w) { return to_bytes(w.serialize()); })
      .def_static("deserialize", [](const WindowConfig& c, const py::bytes& b) {
        return WindowedEstimator::deserialize(c, from_bytes(b));
      }, py::arg("config"), py::arg("data"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("duration_ticks", &SimConfig::duration_ticks)
      .def_readwrite("arrival_rate", &SimConfig::arrival_rate)
      .def_readwrite("renewal_interval", &SimConfig::renewal_interval)
      .def_readwrite("allow_slow_renewal", &SimConfig::allow_slow_renewal)
      .def_readwrite("renewal_stamp", &SimConfig::renewal_stamp)
      .def_readwrite("service_rate", &SimConfig::service_rate)
      .def_readwrite("query_fraction", &SimConfig::query_fraction)
      .def_readwrite("surge_start", &SimConfig::surge_start)
      .def_readwrite("surge_ticks", &SimConfig::surge_ticks)
      .def_readwrite("surge_rate", &SimConfig::surge_rate)
      .def_readwrite("window", &SimConfig::window)
      .def_readwrite("rng_seed", &SimConfig::rng_seed);

  m.def("run_simulation", [](const SimConfig& config) {
    SimResult result;
    {
      py::gil_scoped_release release;
      result = run_simulation(config);
    }
    py::list records;
    for (const auto& r : result.records) records.append(record_to_dict(r));
    py::dict out;
    out["summary"] = json_to_py(to_json(result.summary));
    out["records"] = records;
    out["snapshot"] = to_bytes(result.snapshot);
    return out;
  }, py::arg("config"), "Runs the workload simulator; returns summary, records and final snapshot.");
}
