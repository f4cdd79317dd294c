#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hmplace/placement.hpp"
#include "hmplace/simulator.hpp"

namespace hmplace {

struct PlanChoice {
  PlacementPlan plan;
  Seconds predicted_local = 0.0;
  Seconds predicted_global = 0.0;
  Seconds predicted_hold = 0.0;
};

// Predicts both searches plus a do-nothing plan over `horizon` enforced
// iterations (default: trace.iterations - 1) and keeps the fastest.
// Ties go to global, then hold.
PlanChoice choose_plan(const PlacementPlan& local, const PlacementPlan& global, const Trace& trace,
                       const MachineConfig& cfg, std::optional<int> horizon = {});

enum class SearchMode { Auto, Local, Global };
enum class PartitionMode { Auto, On, Off };

std::string_view to_string(SearchMode m);
std::string_view to_string(PartitionMode m);
SearchMode parse_search_mode(std::string_view s);
PartitionMode parse_partition_mode(std::string_view s);

struct PlanOptions {
  SearchMode search = SearchMode::Auto;
  PartitionMode partition = PartitionMode::Auto;
  // DRAM contents when the plan takes over; defaults to initial_placement.
  std::optional<IdSet> start;
  std::optional<int> horizon;
};

struct PlanResult {
  Trace trace;  // after partitioning
  PlacementPlan plan;
  PlacementPlan local;
  PlacementPlan global;
  Seconds predicted_local = 0.0;
  Seconds predicted_global = 0.0;
  Seconds predicted_hold = 0.0;
};

PlanResult plan_placement(const Trace& trace, const MachineConfig& cfg,
                          const PlanOptions& options = {});

enum class Policy { NvmOnly, DramOnly, Managed, LocalOnly, GlobalOnly, StaticPlan };

std::string_view to_string(Policy p);
Policy parse_policy(std::string_view s);

struct RunOptions {
  // Required for StaticPlan.
  std::optional<PlacementPlan> plan;
  std::optional<NoiseTable> noise;
  PartitionMode partition = PartitionMode::Auto;
  bool adapt = true;
  SimulationObserver observer;
};

SimulationReport run_policy(const Trace& trace, const MachineConfig& cfg, Policy policy,
                            const RunOptions& options = {});

}  // namespace hmplace
