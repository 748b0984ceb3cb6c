#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrpsc/bench.hpp"
#include "vrpsc/instance.hpp"
#include "vrpsc/oracle.hpp"
#include "vrpsc/search.hpp"
#include "vrpsc/solution.hpp"
#include "vrpsc/temporal.hpp"

namespace py = pybind11;
using namespace vrpsc;

PYBIND11_MODULE(_vrpsc, m) {
  m.doc() = "Routing with pairwise visit synchronization: instance model, "
            "LP-guided adaptive large neighborhood search, exact tiny-instance "
            "oracle and solution validation.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::enum_<VehicleClass>(m, "VehicleClass")
      .value("regular", VehicleClass::regular)
      .value("special", VehicleClass::special);

  py::class_<Instance>(m, "Instance")
      .def_static("from_text", &Instance::from_text, py::arg("text"))
      .def("to_text", &Instance::to_text)
      .def_property_readonly("name", &Instance::name)
      .def_property_readonly("source", &Instance::source)
      .def_property_readonly("size", &Instance::size)
      .def_property_readonly("request_count", &Instance::request_count)
      .def_property_readonly("capacity", &Instance::capacity)
      .def_property_readonly("regular_customers",
                             [](const Instance& i) { return i.regular_customers(); })
      .def_property_readonly("special_customers",
                             [](const Instance& i) { return i.special_customers(); })
      .def("vehicles", &Instance::vehicles, py::arg("klass"))
      .def("travel", &Instance::travel, py::arg("klass"), py::arg("a"), py::arg("b"))
      .def("service", &Instance::service, py::arg("klass"), py::arg("a"))
      .def("__repr__", [](const Instance& i) {
        return "<Instance " + i.name() + ", " + std::to_string(i.request_count()) +
               " requests>";
      });

  m.def(
      "transform",
      [](const std::string& raw_text, double ns, double alpha, double beta,
         int fleet_special, bool truncate, int take, const std::string& name) {
        RawVrptw raw = parse_vrptw(raw_text);
        if (!name.empty()) raw.name = name;
        if (take > 0) raw = take_customers(raw, take);
        TransformOptions opt;
        opt.ns = ns;
        opt.alpha = alpha;
        opt.beta = beta;
        opt.vehicles_special = fleet_special;
        opt.truncate_distances = truncate;
        return Instance::transform(raw, opt);
      },
      py::arg("raw_text"), py::arg("ns") = 0.25, py::arg("alpha") = 0.0,
      py::arg("beta") = 10.0, py::arg("fleet_special") = 0,
      py::arg("truncate") = false, py::arg("take") = 0, py::arg("name") = "",
      "Parse a classic benchmark file and build a synchronized instance.");

  py::class_<Route>(m, "Route")
      .def_readonly("klass", &Route::klass)
      .def_readonly("visits", &Route::visits)
      .def_readonly("load", &Route::load)
      .def_property_readonly("customers", &Route::customer_count);

  py::class_<Solution>(m, "Solution")
      .def_property_readonly("cost", &Solution::cost)
      .def("routes", &Solution::routes, py::arg("klass"))
      .def("tau", &Solution::tau, py::arg("vertex"))
      .def("served", &Solution::served, py::arg("vertex"))
      .def("to_text", &Solution::to_text, py::arg("instance"))
      .def_static("from_text", &Solution::from_text, py::arg("instance"),
                  py::arg("text"))
      .def("__repr__", [](const Solution& s) {
        return "<Solution cost " + fmt_num(s.cost()) + ">";
      });

  m.def(
      "validate",
      [](const Instance& ins, const Solution& sol) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(ins, sol)) {
          out.emplace_back(to_string(v.code), v.message);
        }
        return out;
      },
      py::arg("instance"), py::arg("solution"),
      "Independent feasibility check; returns (code, message) pairs, empty when ok.");

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("iterations", &SearchConfig::iterations)
      .def_readwrite("noise", &SearchConfig::noise)
      .def_readwrite("sa_start_ratio", &SearchConfig::sa_start_ratio)
      .def_readwrite("sa_cooling", &SearchConfig::sa_cooling)
      .def_readwrite("segment", &SearchConfig::segment)
      .def_readwrite("validate_incumbents", &SearchConfig::validate_incumbents)
      .def_readwrite("keep_trace", &SearchConfig::keep_trace)
      .def_static("from_json", &config_from_json, py::arg("text"))
      .def("to_json", [](const SearchConfig& c) { return config_to_json(c); });

  py::class_<OperatorStat>(m, "OperatorStat")
      .def_readonly("name", &OperatorStat::name)
      .def_readonly("weight", &OperatorStat::weight)
      .def_readonly("uses", &OperatorStat::uses);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("best", &SearchResult::best)
      .def_readonly("initial_cost", &SearchResult::initial_cost)
      .def_readonly("best_cost", &SearchResult::best_cost)
      .def_readonly("iterations", &SearchResult::iterations)
      .def_readonly("runtime_seconds", &SearchResult::runtime_seconds)
      .def_readonly("best_updates", &SearchResult::best_updates)
      .def_readonly("accepted_moves", &SearchResult::accepted_moves)
      .def_readonly("failed_repairs", &SearchResult::failed_repairs)
      .def_readonly("validator_failures", &SearchResult::validator_failures)
      .def_readonly("removal_ops", &SearchResult::removal_ops)
      .def_readonly("repair_ops", &SearchResult::repair_ops);

  m.def(
      "solve",
      [](const Instance& ins, const SearchConfig& cfg) {
        py::gil_scoped_release release;
        return run_search(ins, cfg);
      },
      py::arg("instance"), py::arg("config") = SearchConfig{},
      "Run the adaptive large neighborhood search and return the result bundle.");

  m.def(
      "solve_exact",
      [](const Instance& ins, int max_customers, int max_special,
         int max_vehicles) -> std::optional<Solution> {
        OracleLimits lim;
        lim.max_customers = max_customers;
        lim.max_special = max_special;
        lim.max_vehicles = max_vehicles;
        py::gil_scoped_release release;
        return solve_exact(ins, lim);
      },
      py::arg("instance"), py::arg("max_customers") = 7, py::arg("max_special") = 3,
      py::arg("max_vehicles") = 3,
      "Provably optimal solution of a tiny instance, or None when infeasible.");
}
