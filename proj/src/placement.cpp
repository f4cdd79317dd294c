#include "hmplace/placement.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "hmplace/benefit_cost.hpp"
#include "hmplace/error.hpp"

namespace hmplace {

namespace {

Granules granules_of(const Trace& trace, const IdSet& ids, const MachineConfig& cfg) {
  Granules total = 0;
  for (const auto& id : ids) total += cfg.to_granules(trace.object(id).size);
  return total;
}

int first_reference(const Trace& trace, const ObjectId& id) {
  for (const auto& ph : trace.phases) {
    if (ph.references(id)) return ph.id;
  }
  return -1;
}

// Evictions first, then arrivals; each in id order.
std::vector<Migration> transition(const IdSet& prev, const IdSet& next, int target) {
  std::vector<Migration> moves;
  for (const auto& id : prev) {
    if (!next.contains(id)) moves.push_back({id, Direction::ToNvm, target, target, false});
  }
  for (const auto& id : next) {
    if (!prev.contains(id)) moves.push_back({id, Direction::ToDram, target, target, false});
  }
  return moves;
}

// Latest unrolled position at which every move of the group may start.
int own_position(const Trace& trace, const std::vector<Migration>& moves, int target) {
  int pos = target - static_cast<int>(trace.phases.size()) + 1;
  for (const auto& m : moves) {
    pos = std::max(pos, target - quiet_window(trace.phases, target, m.object).distance);
  }
  return pos;
}

void stamp(std::vector<Migration>& moves, int position, int phase_count) {
  for (auto& m : moves) {
    m.trigger = ((position % phase_count) + phase_count) % phase_count;
    m.wraps = position < 0;
  }
}

std::vector<IdSet> local_residency(const Trace& trace, const MachineConfig& cfg,
                                   const IdSet& start) {
  const Granules cap = cfg.capacity_granules();
  IdSet context = start;
  std::vector<IdSet> out;
  out.reserve(trace.phases.size());

  for (const auto& phase : trace.phases) {
    const PlacementContext ctx{context};
    std::vector<KnapsackItem> items;
    for (const auto& id : phase.referenced) {
      const auto& obj = trace.object(id);
      MovementEstimate est;
      try {
        est = estimate_movement(obj, phase.id, ctx, trace, cfg);
      } catch (const InfeasibleEviction&) {
        continue;
      }
      if (est.weight > 0) items.push_back({id, est.weight, cfg.to_granules(obj.size)});
    }
    const IdSet selected = knapsack_solve(items, cap);

    // Objects already in DRAM stay unless the selection needs their space.
    std::vector<SizedId> others;
    Granules others_g = 0;
    for (const auto& id : context) {
      if (selected.contains(id)) continue;
      others.push_back({id, cfg.to_granules(trace.object(id).size)});
      others_g += others.back().size;
    }
    IdSet next = selected;
    const Granules shortfall = granules_of(trace, selected, cfg) + others_g - cap;
    IdSet victims;
    if (shortfall > 0) {
      const auto cover = min_cover(others, shortfall);
      if (!cover) throw PlanningError("selection exceeds DRAM capacity");
      victims.insert(cover->ids.begin(), cover->ids.end());
      // Among equally small victim sets, take the one that can leave
      // earliest so its evictions overlap the preceding phases.
      std::vector<int> window;
      for (const auto& o : others) window.push_back(quiet_window(trace.phases, phase.id, o.id).distance);
      std::vector<int> levels(window.begin(), window.end());
      std::sort(levels.begin(), levels.end(), std::greater<>());
      for (int d : levels) {
        std::vector<SizedId> early;
        for (std::size_t i = 0; i < others.size(); ++i) {
          if (window[i] >= d) early.push_back(others[i]);
        }
        const auto c = min_cover(early, shortfall);
        if (c && c->total == cover->total) {
          victims = IdSet(c->ids.begin(), c->ids.end());
          break;
        }
      }
    }
    for (const auto& o : others) {
      if (!victims.contains(o.id)) next.insert(o.id);
    }
    out.push_back(next);
    context = std::move(next);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw PlanningError(what);
}

}  // namespace

std::string_view to_string(PlanMode m) {
  switch (m) {
    case PlanMode::PhaseLocal: return "local";
    case PlanMode::CrossGlobal: return "global";
    case PlanMode::Hold: return "hold";
  }
  return "unknown";
}

std::string_view to_string(Direction d) {
  return d == Direction::ToDram ? "nvm_to_dram" : "dram_to_nvm";
}

IdSet initial_placement(std::span<const DataObject> objects, const MachineConfig& cfg) {
  std::vector<const DataObject*> ranked;
  for (const auto& o : objects) {
    if (o.static_ref_estimate) ranked.push_back(&o);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const DataObject* a, const DataObject* b) {
    if (*a->static_ref_estimate != *b->static_ref_estimate) {
      return *a->static_ref_estimate > *b->static_ref_estimate;
    }
    return a->id < b->id;
  });
  IdSet chosen;
  Granules free = cfg.capacity_granules();
  for (const auto* o : ranked) {
    const Granules g = cfg.to_granules(o->size);
    if (g <= free) {
      chosen.insert(o->id);
      free -= g;
    }
  }
  return chosen;
}

Schedule schedule_residency(const Trace& trace, const IdSet& start,
                            const std::vector<IdSet>& residency) {
  const auto n = static_cast<int>(trace.phases.size());
  Schedule out;
  if (n == 0) return out;
  require(static_cast<int>(residency.size()) == n, "residency needs one set per phase");

  // Entry: the previous iteration was profiling, so nothing may wrap.
  int last = 0;
  for (int p = 0; p < n; ++p) {
    const IdSet& prev = p == 0 ? start : residency[static_cast<std::size_t>(p - 1)];
    auto moves = transition(prev, residency[static_cast<std::size_t>(p)], p);
    if (moves.empty()) continue;
    const int pos = p == 0 ? 0 : std::max({own_position(trace, moves, p), 0, last});
    stamp(moves, pos, n);
    last = pos;
    out.entry.insert(out.entry.end(), moves.begin(), moves.end());
  }

  // Steady state: positions are monotone along the cycle, including the
  // seam between one iteration's last group and the next one's first.
  struct Group {
    int target;
    int own;
    int pos;
    std::vector<Migration> moves;
  };
  std::vector<Group> groups;
  for (int p = 0; p < n; ++p) {
    const IdSet& prev = residency[static_cast<std::size_t>((p + n - 1) % n)];
    auto moves = transition(prev, residency[static_cast<std::size_t>(p)], p);
    if (moves.empty()) continue;
    const int own = own_position(trace, moves, p);
    groups.push_back({p, own, own, std::move(moves)});
  }
  if (!groups.empty()) {
    int floor = std::numeric_limits<int>::min();
    for (;;) {
      groups.front().pos = std::max(groups.front().own, floor);
      for (std::size_t g = 1; g < groups.size(); ++g) {
        groups[g].pos = std::max(groups[g].own, groups[g - 1].pos);
      }
      const int required = groups.back().pos - n;
      if (groups.front().pos >= required) break;
      floor = required;
    }
    for (auto& g : groups) {
      stamp(g.moves, g.pos, n);
      out.steady.insert(out.steady.end(), g.moves.begin(), g.moves.end());
    }
  }
  return out;
}

PlacementPlan phase_local_search(const Trace& trace, const MachineConfig& cfg,
                                 const IdSet& start) {
  if (trace.phases.empty()) throw PlanningError("no phases");
  PlacementPlan plan;
  plan.mode = PlanMode::PhaseLocal;
  plan.initial_dram = start;
  plan.per_phase_residency = local_residency(trace, cfg, start);
  auto schedule = schedule_residency(trace, start, plan.per_phase_residency);
  plan.migrations = std::move(schedule.entry);
  plan.steady_migrations = std::move(schedule.steady);
  return plan;
}

PlacementPlan cross_global_search(const Trace& trace, const MachineConfig& cfg,
                                  const IdSet& start) {
  if (trace.phases.empty()) throw PlanningError("no phases");
  const Granules cap = cfg.capacity_granules();

  std::vector<KnapsackItem> items;
  std::map<ObjectId, int> first_ref;
  for (const auto& obj : trace.objects) {
    const int first = first_reference(trace, obj.id);
    if (first < 0) continue;
    first_ref[obj.id] = first;
    const Granules g = cfg.to_granules(obj.size);
    if (g > cap) continue;
    Seconds total_benefit = 0.0;
    for (const auto& ph : trace.phases) total_benefit += phase_benefit(ph, obj.id, cfg).benefit;
    Seconds cost = 0.0;
    if (!start.contains(obj.id)) {
      // The decision point is the iteration boundary; the copy can overlap
      // every phase before the first reference.
      Seconds window = 0.0;
      for (int p = 0; p < first; ++p) window += trace.phases[static_cast<std::size_t>(p)].baseline_time;
      cost = movement_cost(obj.size, window, cfg);
    }
    items.push_back({obj.id, total_benefit - cost, g});
  }
  IdSet resident = knapsack_solve(items, cap);

  Granules used = granules_of(trace, resident, cfg);
  for (const auto& id : start) {
    if (resident.contains(id)) continue;
    const Granules g = cfg.to_granules(trace.object(id).size);
    if (used + g <= cap) {
      resident.insert(id);
      used += g;
    }
  }

  PlacementPlan plan;
  plan.mode = PlanMode::CrossGlobal;
  plan.initial_dram = start;
  plan.per_phase_residency.assign(trace.phases.size(), resident);

  std::vector<Migration> arrivals;
  for (const auto& id : resident) {
    if (!start.contains(id)) arrivals.push_back({id, Direction::ToDram, 0, first_ref.at(id), false});
  }
  std::stable_sort(arrivals.begin(), arrivals.end(),
                   [](const Migration& a, const Migration& b) { return a.target < b.target; });
  const int earliest = arrivals.empty() ? 0 : arrivals.front().target;
  for (const auto& id : start) {
    if (resident.contains(id)) continue;
    const auto it = first_ref.find(id);
    const int target = it == first_ref.end() ? earliest : std::min(earliest, it->second);
    plan.migrations.push_back({id, Direction::ToNvm, 0, target, false});
  }
  std::stable_sort(plan.migrations.begin(), plan.migrations.end(),
                   [](const Migration& a, const Migration& b) { return a.target < b.target; });
  plan.migrations.insert(plan.migrations.end(), arrivals.begin(), arrivals.end());
  return plan;
}

PlacementPlan hold_plan(const Trace& trace, const IdSet& start) {
  PlacementPlan plan;
  plan.mode = PlanMode::Hold;
  plan.initial_dram = start;
  plan.per_phase_residency.assign(trace.phases.size(), start);
  return plan;
}

void validate_plan(const PlacementPlan& plan, const Trace& trace, const MachineConfig& cfg) {
  const auto n = static_cast<int>(trace.phases.size());
  const Granules cap = cfg.capacity_granules();
  require(static_cast<int>(plan.per_phase_residency.size()) == n,
          "plan has " + std::to_string(plan.per_phase_residency.size()) +
              " residency sets for " + std::to_string(n) + " phases");
  require(granules_of(trace, plan.initial_dram, cfg) <= cap, "initial_dram exceeds capacity");
  for (int p = 0; p < n; ++p) {
    require(granules_of(trace, plan.per_phase_residency[static_cast<std::size_t>(p)], cfg) <= cap,
            "phase " + std::to_string(p) + " residency exceeds capacity");
  }

  auto check_list = [&](const std::vector<Migration>& list, const IdSet& start, bool steady) {
    const std::string which = steady ? "steady" : "entry";
    // FIFO order: capacity and source/destination consistency.
    IdSet state = start;
    Granules used = granules_of(trace, state, cfg);
    for (const auto& m : list) {
      require(m.target >= 0 && m.target < n && m.trigger >= 0 && m.trigger < n,
              which + " migration of '" + m.object + "' has an out-of-range phase");
      require(steady || !m.wraps, "entry migration of '" + m.object + "' wraps");
      const Granules g = cfg.to_granules(trace.object(m.object).size);
      if (m.direction == Direction::ToDram) {
        require(!state.contains(m.object), which + " migration brings '" + m.object +
                                               "' into DRAM twice");
        used += g;
        require(used <= cap, which + " migration of '" + m.object + "' overflows DRAM");
        state.insert(m.object);
      } else {
        require(state.contains(m.object), which + " migration evicts absent '" + m.object + "'");
        used -= g;
        state.erase(m.object);
      }
      // Dependency safety over [trigger, target).
      const int from = m.wraps ? m.trigger - n : m.trigger;
      require(from <= m.target, which + " migration of '" + m.object + "' triggers after target");
      for (int q = from; q < m.target; ++q) {
        require(!trace.phases[static_cast<std::size_t>((q + n) % n)].references(m.object),
                which + " migration of '" + m.object + "' overlaps a phase referencing it");
      }
    }
    // Residency as seen by each phase.
    state = start;
    for (int p = 0; p < n; ++p) {
      for (const auto& m : list) {
        if (m.target != p) continue;
        if (m.direction == Direction::ToDram) state.insert(m.object);
        else state.erase(m.object);
      }
      const auto& want = plan.per_phase_residency[static_cast<std::size_t>(p)];
      for (const auto& id : state) {
        const bool leaving = std::any_of(list.begin(), list.end(), [&](const Migration& m) {
          return m.object == id && m.direction == Direction::ToNvm && m.target > p;
        });
        require(want.contains(id) || leaving, which + ": '" + id + "' is in DRAM at phase " +
                                       std::to_string(p) + " without being planned there");
      }
      for (const auto& id : trace.phases[static_cast<std::size_t>(p)].referenced) {
        require(want.contains(id) == state.contains(id),
                which + ": '" + id + "' location at phase " + std::to_string(p) +
                    " disagrees with the plan");
      }
    }
    require(state == plan.per_phase_residency.back(),
            which + " migrations do not reach the last phase's residency");
  };

  if (n == 0) return;
  check_list(plan.migrations, plan.initial_dram, false);
  check_list(plan.steady_migrations, plan.per_phase_residency.back(), true);
}

std::vector<Chunk> partition_object(const DataObject& obj, const MachineConfig& cfg,
                                    Bytes chunk_size) {
  const Bytes cs = chunk_size == 0 ? cfg.effective_chunk_size()
                                   : std::max<Bytes>(1, std::min(chunk_size, cfg.dram_capacity));
  if (!obj.partitionable || obj.size <= cs) return {{obj.id, obj.id, 0, 0, obj.size}};
  std::vector<Chunk> chunks;
  for (Bytes off = 0; off < obj.size; off += cs) {
    const int k = static_cast<int>(chunks.size());
    chunks.push_back({obj.id + "#" + std::to_string(k), obj.id, k, off,
                      std::min(cs, obj.size - off)});
  }
  return chunks;
}

std::vector<double> chunk_fractions(const DataObject& obj, std::span<const Chunk> chunks,
                                    std::span<const double> histogram) {
  std::vector<double> out;
  out.reserve(chunks.size());
  const auto size = static_cast<double>(obj.size);
  if (histogram.empty()) {
    for (const auto& c : chunks) out.push_back(static_cast<double>(c.size) / size);
    return out;
  }
  double sum = 0.0;
  for (double h : histogram) sum += h;
  const double width = size / static_cast<double>(histogram.size());
  for (const auto& c : chunks) {
    const double lo = static_cast<double>(c.offset);
    const double hi = lo + static_cast<double>(c.size);
    double f = 0.0;
    for (std::size_t j = 0; j < histogram.size(); ++j) {
      const double blo = width * static_cast<double>(j);
      const double bhi = j + 1 == histogram.size() ? size : blo + width;
      const double overlap = std::min(hi, bhi) - std::max(lo, blo);
      if (overlap > 0) f += histogram[j] * (overlap / width);
    }
    out.push_back(f / sum);
  }
  return out;
}

Trace apply_partitioning(const Trace& trace, std::span<const PartitionRecord> records,
                         const MachineConfig& cfg) {
  Trace out = trace;
  for (const auto& rec : records) {
    const DataObject obj = out.object(rec.object);
    if (!obj.partitionable) throw PlanningError("object '" + obj.id + "' is not partitionable");
    const auto chunks = partition_object(obj, cfg, rec.chunk_size);
    if (chunks.size() == 1) continue;

    std::vector<DataObject> objects;
    for (const auto& o : out.objects) {
      if (o.id != obj.id) {
        objects.push_back(o);
        continue;
      }
      for (const auto& c : chunks) {
        DataObject piece{c.id, c.size, false, std::nullopt};
        if (o.static_ref_estimate) {
          piece.static_ref_estimate = *o.static_ref_estimate * static_cast<double>(c.size) /
                                      static_cast<double>(o.size);
        }
        objects.push_back(piece);
      }
    }
    out.objects = std::move(objects);

    const auto hist_it = out.chunk_histograms.find(obj.id);
    auto fractions_for = [&](int phase) {
      std::span<const double> h;
      if (hist_it != out.chunk_histograms.end()) h = hist_it->second.at(static_cast<std::size_t>(phase));
      return chunk_fractions(obj, chunks, h);
    };
    auto split = [&](std::vector<AccessRecord>& accesses, int phase) {
      std::vector<AccessRecord> next;
      for (const auto& a : accesses) {
        if (a.object_id != obj.id) {
          next.push_back(a);
          continue;
        }
        const auto f = fractions_for(phase);
        for (std::size_t k = 0; k < chunks.size(); ++k) {
          next.push_back({chunks[k].id, a.data_access * f[k], a.samples_with_access * f[k]});
        }
      }
      accesses = std::move(next);
    };

    for (auto& ph : out.phases) {
      if (!ph.referenced.erase(obj.id)) continue;
      for (const auto& c : chunks) ph.referenced.insert(c.id);
      split(ph.accesses, ph.id);
    }
    for (auto& ov : out.per_iteration_overrides) split(ov.accesses, ov.phase);
    if (hist_it != out.chunk_histograms.end()) out.chunk_histograms.erase(hist_it);
  }
  out.validate();
  return out;
}

}  // namespace hmplace
