#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hmplace/knapsack.hpp"
#include "hmplace/trace.hpp"

namespace hmplace {

enum class PlanMode {
  PhaseLocal,   // one knapsack per phase
  CrossGlobal,  // one knapsack over all phases, constant residency
  Hold,         // keep the current DRAM contents, never migrate
};

enum class Direction { ToDram, ToNvm };

// A request handed to the migration engine at the start of phase `trigger`.
// It must have completed before phase `target` begins. `wraps` places the
// trigger in the iteration before the target's.
struct Migration {
  ObjectId object;
  Direction direction = Direction::ToDram;
  int trigger = 0;
  int target = 0;
  bool wraps = false;

  bool operator==(const Migration&) const = default;
};

struct PartitionRecord {
  ObjectId object;
  Bytes chunk_size = 0;

  bool operator==(const PartitionRecord&) const = default;
};

struct PlacementPlan {
  PlanMode mode = PlanMode::Hold;
  std::vector<PartitionRecord> partitioned;
  IdSet initial_dram;
  std::vector<IdSet> per_phase_residency;
  // First enforced iteration, starting from initial_dram.
  std::vector<Migration> migrations;
  // Every later iteration; replays per_phase_residency cyclically.
  std::vector<Migration> steady_migrations;
  std::optional<Seconds> predicted_total;

  bool operator==(const PlacementPlan&) const = default;
};

std::string_view to_string(PlanMode m);
std::string_view to_string(Direction d);

// Objects in DRAM before the main loop: descending static reference
// estimate, first fit. Objects without an estimate stay in NVM.
IdSet initial_placement(std::span<const DataObject> objects, const MachineConfig& cfg);

PlacementPlan phase_local_search(const Trace& trace, const MachineConfig& cfg,
                                 const IdSet& start = {});
PlacementPlan cross_global_search(const Trace& trace, const MachineConfig& cfg,
                                  const IdSet& start = {});
PlacementPlan hold_plan(const Trace& trace, const IdSet& start);

// Derives trigger points for a per-phase residency sequence.
struct Schedule {
  std::vector<Migration> entry;
  std::vector<Migration> steady;
};
Schedule schedule_residency(const Trace& trace, const IdSet& start,
                            const std::vector<IdSet>& residency);

// Checks capacity, residency/migration consistency and dependency safety.
// Throws PlanningError describing the first violation.
void validate_plan(const PlacementPlan& plan, const Trace& trace, const MachineConfig& cfg);

struct Chunk {
  ObjectId id;
  ObjectId parent;
  int index = 0;
  Bytes offset = 0;
  Bytes size = 0;
};

// Equal chunks of min(chunk_size, dram_capacity) with a smaller tail.
// Objects that are not partitionable come back as one whole chunk.
std::vector<Chunk> partition_object(const DataObject& obj, const MachineConfig& cfg,
                                    Bytes chunk_size = 0);

// Per-chunk share of the object's accesses. An empty histogram spreads
// accesses by bytes; otherwise the histogram is read as a density over equal
// slices of the object.
std::vector<double> chunk_fractions(const DataObject& obj, std::span<const Chunk> chunks,
                                    std::span<const double> histogram);

// Replaces each listed object with its chunks throughout the trace.
Trace apply_partitioning(const Trace& trace, std::span<const PartitionRecord> records,
                         const MachineConfig& cfg);

}  // namespace hmplace
