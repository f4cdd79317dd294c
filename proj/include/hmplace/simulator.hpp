#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hmplace/placement.hpp"

namespace hmplace {

struct PhaseTime {
  Seconds time = 0.0;
  bool clamped = false;
};

// Phase time under the given DRAM residency: the NVM baseline minus the
// benefit of every resident object, floored at phase_time_floor x baseline.
PhaseTime predict_phase_time(const PhaseProfile& phase, const IdSet& dram,
                             const MachineConfig& cfg);

struct Stall {
  int iteration = 0;
  int phase = 0;
  Seconds wait = 0.0;

  bool operator==(const Stall&) const = default;
};

struct SimulationReport {
  std::string policy;
  Seconds total_time = 0.0;
  std::vector<std::vector<Seconds>> per_phase_times;  // [iteration][phase]
  int migrations_count = 0;
  Bytes migrated_bytes = 0;
  Seconds engine_busy_time = 0.0;
  double pct_overlap = 100.0;
  std::vector<Stall> stalls;
  int replans = 0;
  int clamp_hits = 0;
  Seconds overhead_time = 0.0;
  std::vector<std::string> warnings;

  Seconds stall_time() const;
  Seconds stall_at(int iteration, int phase) const;

  bool operator==(const SimulationReport&) const = default;
};

// Hooks for independent checking of the engine timeline.
struct SimulationObserver {
  // One completed migration: [start, end) on the engine.
  std::function<void(const ObjectId&, Direction, Seconds start, Seconds end)> on_migration;
  // One executed phase: [start, end) of execution, after any stall.
  std::function<void(int iteration, int phase, Seconds start, Seconds end)> on_phase;
  // DRAM granules free after every engine event.
  std::function<void(Granules free)> on_capacity;
};

// Builds a new plan from a re-profiled trace, a starting residency and the
// number of iterations left to run.
using Replanner =
    std::function<PlacementPlan(const Trace& profile, const IdSet& start, int iterations)>;

using NoiseTable = std::vector<std::vector<double>>;

struct SimulationOptions {
  std::string policy = "plan";
  // Replaces the trace's per-iteration noise.
  std::optional<NoiseTable> noise;
  // Enables the re-profiling trigger; replans with `replanner`.
  bool adapt = false;
  Replanner replanner;
  bool enforce_capacity = true;
  // Skip the profiling iteration: the plan is enforced from iteration 0.
  bool enforce_from_start = false;
  std::optional<int> iterations;
  SimulationObserver observer;
};

// Runs the plan over the trace in virtual time. Phases execute one after
// another while a single migration engine drains a FIFO of requests.
// Throws SimulationError on dependency or capacity violations.
SimulationReport simulate(const Trace& trace, const PlacementPlan& plan,
                          const MachineConfig& cfg, const SimulationOptions& options = {});

// Total time of `iterations` enforced iterations starting from the plan's
// initial_dram, without noise or adaptation.
Seconds predict_plan_total(const Trace& trace, const PlacementPlan& plan,
                           const MachineConfig& cfg, int iterations);

}  // namespace hmplace
