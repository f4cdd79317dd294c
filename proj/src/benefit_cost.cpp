#include "hmplace/benefit_cost.hpp"

#include <algorithm>
#include <limits>

#include "hmplace/error.hpp"
#include "hmplace/knapsack.hpp"

namespace hmplace {

Seconds benefit_bw(double data_access, const MachineConfig& cfg) {
  const double bytes = data_access * static_cast<double>(cfg.cacheline_size);
  return (bytes / cfg.nvm_bw - bytes / cfg.dram_bw) * cfg.cf_bw;
}

Seconds benefit_lat(double data_access, const MachineConfig& cfg) {
  return (data_access * cfg.nvm_lat - data_access * cfg.dram_lat) * cfg.cf_lat;
}

Seconds benefit(const AccessRecord& access, Sensitivity sens, const MachineConfig& cfg) {
  switch (sens) {
    case Sensitivity::Bandwidth: return benefit_bw(access.data_access, cfg);
    case Sensitivity::Latency: return benefit_lat(access.data_access, cfg);
    case Sensitivity::Mixed:
      return std::max(benefit_bw(access.data_access, cfg), benefit_lat(access.data_access, cfg));
  }
  return 0.0;
}

PhaseBenefit phase_benefit(const PhaseProfile& phase, const ObjectId& id,
                           const MachineConfig& cfg) {
  const AccessRecord* rec = phase.access_for(id);
  if (rec == nullptr || rec->samples_with_access <= 0 || rec->data_access <= 0) return {};
  const auto bw = object_bandwidth(*rec, phase.samples_total, phase.baseline_time, cfg);
  const auto sens = classify_sensitivity(bw, cfg);
  return {benefit(*rec, sens, cfg), sens};
}

OverlapWindow quiet_window(std::span<const PhaseProfile> phases, int target_phase,
                           const ObjectId& id) {
  const auto n = static_cast<int>(phases.size());
  OverlapWindow w;
  w.target_phase = target_phase;
  w.trigger_phase = target_phase;
  if (n == 0) return w;
  for (int k = 1; k < n; ++k) {
    const int p = ((target_phase - k) % n + n) % n;
    if (phases[static_cast<std::size_t>(p)].references(id)) break;
    w.distance = k;
    w.overlap_time += phases[static_cast<std::size_t>(p)].baseline_time;
  }
  w.trigger_phase = ((target_phase - w.distance) % n + n) % n;
  w.wraps = target_phase - w.distance < 0;
  return w;
}

OverlapWindow overlap_window(const Trace& trace, int target_phase, const ObjectId& id) {
  const auto n = static_cast<int>(trace.phases.size());
  if (target_phase < 0 || target_phase >= n) {
    throw PlanningError("phase " + std::to_string(target_phase) + " out of range");
  }
  const bool anywhere = std::any_of(trace.phases.begin(), trace.phases.end(),
                                    [&](const PhaseProfile& p) { return p.references(id); });
  if (!anywhere) throw NotReferenced("object '" + id + "' is never referenced in the trace");
  if (!trace.phases[static_cast<std::size_t>(target_phase)].references(id)) {
    throw NotReferenced("object '" + id + "' is not referenced in phase " +
                        std::to_string(target_phase));
  }
  return quiet_window(trace.phases, target_phase, id);
}

Seconds movement_cost(Bytes size, Seconds overlap_time, const MachineConfig& cfg) {
  return std::max(static_cast<double>(size) / cfg.mem_copy_bw - overlap_time, 0.0);
}

EvictionPlan eviction_plan(Bytes needed, std::span<const Resident> resident,
                           const Trace& trace, int target_phase, const MachineConfig& cfg) {
  if (needed == 0) return {};
  if (needed > cfg.dram_capacity) {
    throw InfeasibleEviction("need " + std::to_string(needed) + " bytes exceeds DRAM capacity");
  }
  std::vector<SizedId> candidates;
  candidates.reserve(resident.size());
  for (const auto& r : resident) candidates.push_back({r.id, cfg.to_granules(r.size)});

  const auto cover = min_cover(candidates, cfg.to_granules(needed));
  if (!cover) throw InfeasibleEviction("resident objects cannot free enough DRAM");

  EvictionPlan plan;
  plan.victims = cover->ids;
  Seconds binding = std::numeric_limits<double>::infinity();
  for (const auto& v : plan.victims) {
    const auto it = std::find_if(resident.begin(), resident.end(),
                                 [&](const Resident& r) { return r.id == v; });
    plan.evicted_bytes += it->size;
    binding = std::min(binding, quiet_window(trace.phases, target_phase, v).overlap_time);
  }
  plan.extra_cost = movement_cost(plan.evicted_bytes, binding, cfg);
  return plan;
}

MovementEstimate estimate_movement(const DataObject& object, int phase,
                                   const PlacementContext& context, const Trace& trace,
                                   const MachineConfig& cfg) {
  MovementEstimate est;
  const auto pb = phase_benefit(trace.phases.at(static_cast<std::size_t>(phase)), object.id, cfg);
  est.benefit = pb.benefit;
  est.sensitivity = pb.sensitivity;

  if (!context.dram.contains(object.id)) {
    const Granules size_g = cfg.to_granules(object.size);
    const Granules cap_g = cfg.capacity_granules();
    if (size_g > cap_g) {
      throw InfeasibleEviction("object '" + object.id + "' is larger than DRAM");
    }
    est.cost = movement_cost(object.size, quiet_window(trace.phases, phase, object.id).overlap_time,
                             cfg);

    std::vector<Resident> residents;
    Granules used_g = 0;
    for (const auto& id : context.dram) {
      const auto& o = trace.object(id);
      residents.push_back({id, o.size});
      used_g += cfg.to_granules(o.size);
    }
    const Granules need_g = size_g - (cap_g - used_g);
    if (need_g > 0) {
      est.extra_cost =
          eviction_plan(static_cast<Bytes>(need_g) * cfg.capacity_granule, residents, trace,
                        phase, cfg)
              .extra_cost;
    }
  }
  est.weight = est.benefit - est.cost - est.extra_cost;
  return est;
}

}  // namespace hmplace
