#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hmplace/error.hpp"
#include "hmplace/io.hpp"
#include "hmplace/knapsack.hpp"
#include "hmplace/planner.hpp"

namespace py = pybind11;
using namespace hmplace;
using io::json;

// Documents cross the boundary as JSON text; the Python package wraps these
// in dict-based helpers.
namespace {

std::string plan_json(const std::string& trace, const std::string& machine,
                      const std::string& search, const std::string& partition) {
  const auto cfg = io::machine_from_json(json::parse(machine));
  PlanOptions opt;
  opt.search = parse_search_mode(search);
  opt.partition = parse_partition_mode(partition);
  const auto r = plan_placement(io::trace_from_json(json::parse(trace)), cfg, opt);
  json out = {{"plan", io::to_json(r.plan)},
              {"trace", io::to_json(r.trace)},
              {"predicted_local", r.predicted_local},
              {"predicted_global", r.predicted_global},
              {"predicted_hold", r.predicted_hold},
              {"local_migrations", r.local.migrations.size()},
              {"global_migrations", r.global.migrations.size()}};
  return out.dump();
}

std::string simulate_json(const std::string& trace_text, const std::string& machine,
                          const std::vector<std::string>& policies,
                          const std::optional<std::string>& plan,
                          const std::optional<NoiseTable>& noise, bool adapt,
                          const std::string& partition) {
  std::vector<std::string> warnings;
  const auto cfg = io::machine_from_json(json::parse(machine), &warnings);
  const auto trace = io::trace_from_json(json::parse(trace_text));
  RunOptions opt;
  opt.adapt = adapt;
  opt.noise = noise;
  opt.partition = parse_partition_mode(partition);
  if (plan) opt.plan = io::plan_from_json(json::parse(*plan));

  std::vector<SimulationReport> reports;
  {
    py::gil_scoped_release release;
    for (const auto& name : policies) {
      auto r = run_policy(trace, cfg, parse_policy(name), opt);
      r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
      reports.push_back(std::move(r));
    }
  }
  return io::to_json(std::span<const SimulationReport>(reports)).dump();
}

std::string generate_json(const std::string& spec, const std::string& machine, std::uint64_t seed) {
  const auto cfg = io::machine_from_json(json::parse(machine));
  return io::to_json(gen_synthetic(io::generator_from_json(json::parse(spec)), cfg, seed)).dump();
}

double calibrate(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<CalibrationPair> cp;
  for (const auto& [predicted, measured] : pairs) cp.push_back({predicted, measured});
  return calibrate_cf(cp);
}

std::vector<std::string> knapsack(const std::vector<std::tuple<std::string, double, Granules>>& items,
                                  Granules capacity) {
  std::vector<KnapsackItem> in;
  for (const auto& [id, w, s] : items) in.push_back({id, w, s});
  const auto chosen = knapsack_solve(in, capacity);
  return {chosen.begin(), chosen.end()};
}

std::string normalize_machine(const std::string& machine) {
  return io::to_json(io::machine_from_json(json::parse(machine))).dump();
}

}  // namespace

PYBIND11_MODULE(_hmplace, m) {
  m.doc() = "DRAM/NVM placement planner and virtual-time simulator";

  static py::handle error = py::exception<Error>(m, "HmplaceError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
    } catch (const json::exception& e) {
      PyErr_SetString(error.ptr(), (std::string("validation: ") + e.what()).c_str());
    }
  });

  m.attr("SCHEMA_VERSION") = std::string(io::kSchemaVersion);
  m.def("plan", &plan_json, py::arg("trace"), py::arg("machine"), py::arg("search") = "auto",
        py::arg("partition") = "auto");
  m.def("simulate", &simulate_json, py::arg("trace"), py::arg("machine"), py::arg("policies"),
        py::arg("plan") = py::none(), py::arg("noise") = py::none(), py::arg("adapt") = true,
        py::arg("partition") = "auto");
  m.def("generate", &generate_json, py::arg("spec"), py::arg("machine"), py::arg("seed"));
  m.def("calibrate", &calibrate, py::arg("pairs"));
  m.def("knapsack", &knapsack, py::arg("items"), py::arg("capacity"));
  m.def("normalize_machine", &normalize_machine, py::arg("machine"));
}
