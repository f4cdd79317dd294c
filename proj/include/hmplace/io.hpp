#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmplace/placement.hpp"
#include "hmplace/simulator.hpp"
#include "hmplace/synthetic.hpp"

namespace hmplace::io {

using nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1";

// Quantities accept a plain number in base units or a string with a unit
// suffix: "5 GB/s", "4 GiB/s", "400 ns", "256 MiB". Decimal prefixes are
// powers of 1000, binary ones powers of 1024.
double parse_bandwidth(const json& v, const std::string& field);
double parse_seconds(const json& v, const std::string& field);
Bytes parse_bytes(const json& v, const std::string& field);

// Capacity rounding is reported through `warnings` when given.
MachineConfig machine_from_json(const json& j, std::vector<std::string>* warnings = nullptr);
json to_json(const MachineConfig& cfg);

Trace trace_from_json(const json& j);
json to_json(const Trace& trace);

PlacementPlan plan_from_json(const json& j);
json to_json(const PlacementPlan& plan);

SimulationReport report_from_json(const json& j);
json to_json(const SimulationReport& report);

std::vector<SimulationReport> reports_from_json(const json& j);
json to_json(std::span<const SimulationReport> reports);

std::vector<CalibrationPair> calibration_from_json(const json& j);
json to_json(std::span<const CalibrationPair> pairs);

GeneratorSpec generator_from_json(const json& j);
json to_json(const GeneratorSpec& spec);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);
// Two-space indented, trailing newline.
std::string dump(const json& j);

MachineConfig load_machine(const std::string& path, std::vector<std::string>* warnings = nullptr);
Trace load_trace(const std::string& path);
PlacementPlan load_plan(const std::string& path);
SimulationReport load_report(const std::string& path);
std::vector<CalibrationPair> load_calibration(const std::string& path);
GeneratorSpec load_generator(const std::string& path);

// policy,iteration,phase,time_s,stall_s
void write_csv(std::ostream& out, std::span<const SimulationReport> reports);
void print_table(std::ostream& out, std::span<const SimulationReport> reports);

}  // namespace hmplace::io
