#include "hmplace/planner.hpp"

#include <algorithm>

#include "hmplace/benefit_cost.hpp"
#include "hmplace/error.hpp"

namespace hmplace {

PlanChoice choose_plan(const PlacementPlan& local, const PlacementPlan& global, const Trace& trace,
                       const MachineConfig& cfg, std::optional<int> horizon) {
  const int iters = horizon.value_or(trace.iterations - 1);
  PlanChoice out;
  out.predicted_local = predict_plan_total(trace, local, cfg, iters);
  out.predicted_global = predict_plan_total(trace, global, cfg, iters);
  const PlacementPlan hold = hold_plan(trace, global.initial_dram);
  out.predicted_hold = predict_plan_total(trace, hold, cfg, iters);

  Seconds best = out.predicted_global;
  out.plan = global;
  if (out.predicted_hold < best) {
    best = out.predicted_hold;
    out.plan = hold;
  }
  if (out.predicted_local < best) {
    best = out.predicted_local;
    out.plan = local;
  }
  out.plan.predicted_total = best;
  return out;
}

std::string_view to_string(SearchMode m) {
  switch (m) {
    case SearchMode::Auto: return "auto";
    case SearchMode::Local: return "local";
    case SearchMode::Global: return "global";
  }
  return "auto";
}

std::string_view to_string(PartitionMode m) {
  switch (m) {
    case PartitionMode::Auto: return "auto";
    case PartitionMode::On: return "on";
    case PartitionMode::Off: return "off";
  }
  return "auto";
}

SearchMode parse_search_mode(std::string_view s) {
  if (s == "auto") return SearchMode::Auto;
  if (s == "local") return SearchMode::Local;
  if (s == "global") return SearchMode::Global;
  throw ValidationError("search mode must be auto, local or global, got '" + std::string(s) + "'");
}

PartitionMode parse_partition_mode(std::string_view s) {
  if (s == "auto") return PartitionMode::Auto;
  if (s == "on") return PartitionMode::On;
  if (s == "off") return PartitionMode::Off;
  throw ValidationError("partition mode must be auto, on or off, got '" + std::string(s) + "'");
}

namespace {

// Summed benefit minus one copy that can overlap everything before the
// first reference; mirrors the global search's item weight.
Seconds global_weight(const Trace& trace, const DataObject& obj, const MachineConfig& cfg) {
  Seconds total = 0.0;
  Seconds window = 0.0;
  bool seen = false;
  for (const auto& ph : trace.phases) {
    if (ph.references(obj.id)) seen = true;
    if (!seen) window += ph.baseline_time;
    total += phase_benefit(ph, obj.id, cfg).benefit;
  }
  if (!seen) return 0.0;
  return total - movement_cost(obj.size, window, cfg);
}

Granules residency_granules(const Trace& trace, const IdSet& ids, const MachineConfig& cfg) {
  Granules g = 0;
  for (const auto& id : ids) g += cfg.to_granules(trace.object(id).size);
  return g;
}

void search(PlanResult& r, const MachineConfig& cfg, const PlanOptions& options) {
  const IdSet start = options.start.value_or(initial_placement(r.trace.objects, cfg));
  for (const auto& id : start) {
    if (r.trace.find_object(id) == nullptr) {
      throw PlanningError("starting DRAM set names unknown object '" + id + "'");
    }
  }
  r.local = phase_local_search(r.trace, cfg, start);
  r.global = cross_global_search(r.trace, cfg, start);
}

}  // namespace

PlanResult plan_placement(const Trace& trace, const MachineConfig& cfg,
                          const PlanOptions& options) {
  if (trace.phases.empty()) throw PlanningError("no phases");

  std::vector<PartitionRecord> records;
  if (options.partition != PartitionMode::Off) {
    const Bytes chunk = cfg.effective_chunk_size();
    for (const auto& o : trace.objects) {
      if (!o.partitionable || (options.start && options.start->contains(o.id))) continue;
      const bool oversize = o.size > cfg.dram_capacity;
      if (oversize || (options.partition == PartitionMode::On && o.size > chunk)) {
        records.push_back({o.id, chunk});
      }
    }
  }

  PlanResult r;
  r.trace = records.empty() ? trace : apply_partitioning(trace, records, cfg);
  search(r, cfg, options);

  if (options.partition == PartitionMode::Auto) {
    const Granules cap = cfg.capacity_granules();
    const Granules unused =
        cap - residency_granules(r.trace, r.global.per_phase_residency.front(), cfg);
    if (unused * 4 > cap) {
      std::vector<PartitionRecord> more;
      for (const auto& o : r.trace.objects) {
        if (!o.partitionable || cfg.to_granules(o.size) <= unused) continue;
        if (options.start && options.start->contains(o.id)) continue;
        if (global_weight(r.trace, o, cfg) <= 0) continue;
        more.push_back({o.id, cfg.effective_chunk_size()});
      }
      if (!more.empty()) {
        r.trace = apply_partitioning(r.trace, more, cfg);
        records.insert(records.end(), more.begin(), more.end());
        search(r, cfg, options);
      }
    }
  }

  const int horizon = options.horizon.value_or(r.trace.iterations - 1);
  const auto choice = choose_plan(r.local, r.global, r.trace, cfg, horizon);
  r.predicted_local = choice.predicted_local;
  r.predicted_global = choice.predicted_global;
  r.predicted_hold = choice.predicted_hold;
  r.local.predicted_total = r.predicted_local;
  r.global.predicted_total = r.predicted_global;
  switch (options.search) {
    case SearchMode::Auto: r.plan = choice.plan; break;
    case SearchMode::Local: r.plan = r.local; break;
    case SearchMode::Global: r.plan = r.global; break;
  }
  r.local.partitioned = records;
  r.global.partitioned = records;
  r.plan.partitioned = records;
  return r;
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::NvmOnly: return "nvm-only";
    case Policy::DramOnly: return "dram-only";
    case Policy::Managed: return "managed";
    case Policy::LocalOnly: return "local-only";
    case Policy::GlobalOnly: return "global-only";
    case Policy::StaticPlan: return "static";
  }
  return "unknown";
}

Policy parse_policy(std::string_view s) {
  for (Policy p : {Policy::NvmOnly, Policy::DramOnly, Policy::Managed, Policy::LocalOnly,
                   Policy::GlobalOnly, Policy::StaticPlan}) {
    if (to_string(p) == s) return p;
  }
  throw ValidationError("unknown policy '" + std::string(s) + "'");
}

SimulationReport run_policy(const Trace& trace, const MachineConfig& cfg, Policy policy,
                            const RunOptions& options) {
  SimulationOptions sim;
  sim.policy = std::string(to_string(policy));
  sim.noise = options.noise;
  sim.observer = options.observer;

  switch (policy) {
    case Policy::NvmOnly:
      return simulate(trace, hold_plan(trace, {}), cfg, sim);

    case Policy::DramOnly: {
      IdSet all;
      for (const auto& o : trace.objects) all.insert(o.id);
      sim.enforce_capacity = false;
      return simulate(trace, hold_plan(trace, all), cfg, sim);
    }

    case Policy::StaticPlan: {
      if (!options.plan) throw ValidationError("policy 'static' needs a plan");
      const Trace t = options.plan->partitioned.empty()
                          ? trace
                          : apply_partitioning(trace, options.plan->partitioned, cfg);
      return simulate(t, *options.plan, cfg, sim);
    }

    case Policy::Managed:
    case Policy::LocalOnly:
    case Policy::GlobalOnly: {
      PlanOptions po;
      po.partition = options.partition;
      po.search = policy == Policy::LocalOnly    ? SearchMode::Local
                  : policy == Policy::GlobalOnly ? SearchMode::Global
                                                 : SearchMode::Auto;
      const PlanResult planned = plan_placement(trace, cfg, po);
      sim.adapt = options.adapt;
      const SearchMode mode = po.search;
      sim.replanner = [&cfg, mode](const Trace& profile, const IdSet& start, int iterations) {
        PlanOptions again;
        again.search = mode;
        again.partition = PartitionMode::Off;
        again.start = start;
        again.horizon = iterations;
        return plan_placement(profile, cfg, again).plan;
      };
      return simulate(planned.trace, planned.plan, cfg, sim);
    }
  }
  throw ValidationError("unknown policy");
}

}  // namespace hmplace
