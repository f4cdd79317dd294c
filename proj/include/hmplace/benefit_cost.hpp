#pragma once

#include <span>
#include <vector>

#include "hmplace/trace.hpp"

namespace hmplace {

// Time saved by serving data_access sampled accesses from DRAM instead of
// NVM, under the bandwidth model and the latency model respectively.
Seconds benefit_bw(double data_access, const MachineConfig& cfg);
Seconds benefit_lat(double data_access, const MachineConfig& cfg);

Seconds benefit(const AccessRecord& access, Sensitivity sens, const MachineConfig& cfg);

struct PhaseBenefit {
  Seconds benefit = 0.0;
  Sensitivity sensitivity = Sensitivity::Latency;
};

// Classifies the object in the phase and evaluates the matching benefit.
// Objects without attributed samples have no main-memory traffic.
PhaseBenefit phase_benefit(const PhaseProfile& phase, const ObjectId& id,
                           const MachineConfig& cfg);

// Span of phases immediately before target_phase that leave the object
// untouched; a migration enqueued at trigger_phase can overlap all of it.
struct OverlapWindow {
  int trigger_phase = 0;
  int target_phase = 0;
  Seconds overlap_time = 0.0;
  int distance = 0;    // phases in [trigger, target)
  bool wraps = false;  // trigger lies in the previous iteration

  bool operator==(const OverlapWindow&) const = default;
};

// Backward scan from target_phase, wrapping at most once, never throwing.
OverlapWindow quiet_window(std::span<const PhaseProfile> phases, int target_phase,
                           const ObjectId& id);

// Same scan with the referencing preconditions enforced (NotReferenced).
OverlapWindow overlap_window(const Trace& trace, int target_phase, const ObjectId& id);

Seconds movement_cost(Bytes size, Seconds overlap_time, const MachineConfig& cfg);

struct Resident {
  ObjectId id;
  Bytes size = 0;
};

struct EvictionPlan {
  std::vector<ObjectId> victims;
  Bytes evicted_bytes = 0;
  Seconds extra_cost = 0.0;
};

// Smallest set of DRAM residents whose eviction frees `needed` bytes
// (granule-quantized), with the exposed copy-out time. Throws
// InfeasibleEviction when the residents cannot cover the need.
EvictionPlan eviction_plan(Bytes needed, std::span<const Resident> resident,
                           const Trace& trace, int target_phase, const MachineConfig& cfg);

struct PlacementContext {
  IdSet dram;  // objects resident in DRAM when the phase starts
};

struct MovementEstimate {
  Seconds benefit = 0.0;
  Seconds cost = 0.0;
  Seconds extra_cost = 0.0;
  Seconds weight = 0.0;
  Sensitivity sensitivity = Sensitivity::Latency;
};

// Knapsack weight of bringing the object into DRAM for the phase. Throws
// InfeasibleEviction when the object cannot be made to fit.
MovementEstimate estimate_movement(const DataObject& object, int phase,
                                   const PlacementContext& context, const Trace& trace,
                                   const MachineConfig& cfg);

}  // namespace hmplace
