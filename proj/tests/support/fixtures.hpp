#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hmplace/knapsack.hpp"
#include "hmplace/placement.hpp"
#include "hmplace/simulator.hpp"
#include "hmplace/synthetic.hpp"

namespace fixtures {

using namespace hmplace;

inline AccessRecord chase(const ObjectId& id, double data_access, double samples) {
  return {id, data_access, samples};
}

inline PhaseProfile phase(int id, Seconds t, IdSet referenced,
                          std::vector<AccessRecord> accesses = {}) {
  PhaseProfile p;
  p.id = id;
  p.baseline_time = t;
  p.samples_total = 1e6;
  p.referenced = std::move(referenced);
  p.accesses = std::move(accesses);
  return p;
}

// Three equal objects, DRAM for two, references a b c a b.
inline MachineConfig rotation_machine() {
  MachineConfig c;
  c.mem_copy_bw = static_cast<double>(kGiB);
  c.dram_capacity = 512 * kMiB;
  return c;
}

inline Trace rotation_trace(int iterations = 3) {
  Trace t;
  t.iterations = iterations;
  for (const char* id : {"a", "b", "c"}) t.objects.push_back({id, 256 * kMiB, false, {}});
  const std::vector<std::string> refs = {"a", "b", "c", "a", "b"};
  for (int p = 0; p < 5; ++p) {
    const auto& id = refs[static_cast<std::size_t>(p)];
    auto ph = phase(p, 1.0, {id}, {chase(id, 1e6, 5e5)});
    ph.kind = p % 2 == 0 ? PhaseKind::Compute : PhaseKind::Comm;
    t.phases.push_back(std::move(ph));
  }
  return t;
}

// Four 1 s phases; only the first and last reference "a". The plan keeps
// "a" in DRAM for the last phase only, so its copy can overlap phases 1-2.
struct OverlapCase {
  Trace trace;
  MachineConfig cfg;
  PlacementPlan plan;
};

inline OverlapCase overlap_case(Bytes size, BytesPerSecond copy_bw) {
  OverlapCase f;
  f.trace.iterations = 2;
  f.trace.objects.push_back({"a", size, false, {}});
  f.trace.phases = {phase(0, 1.0, {"a"}), phase(1, 1.0, {}), phase(2, 1.0, {}),
                    phase(3, 1.0, {"a"})};
  f.cfg.mem_copy_bw = copy_bw;
  f.cfg.dram_capacity = 4 * kGiB;
  f.plan.mode = PlanMode::PhaseLocal;
  f.plan.per_phase_residency = {{}, {}, {}, {"a"}};
  const auto s = schedule_residency(f.trace, {}, f.plan.per_phase_residency);
  f.plan.migrations = s.entry;
  f.plan.steady_migrations = s.steady;
  return f;
}

// Exhaustive 0-1 knapsack optimum; weights summed in index order.
inline double brute_knapsack(const std::vector<KnapsackItem>& items, Granules capacity) {
  const std::size_t n = items.size();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double w = 0.0;
    Granules s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        w += items[i].weight;
        s += items[i].size;
      }
    }
    if (s <= capacity) best = std::max(best, w);
  }
  return best;
}

inline double weight_of(const std::vector<KnapsackItem>& items, const IdSet& chosen) {
  double w = 0.0;
  for (const auto& it : items) {
    if (chosen.contains(it.id)) w += it.weight;
  }
  return w;
}

// Smallest subset total >= need; -1 when infeasible.
inline std::int64_t brute_min_cover(const std::vector<std::int64_t>& sizes, std::int64_t need) {
  std::int64_t best = -1;
  for (std::uint32_t mask = 0; mask < (1u << sizes.size()); ++mask) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (mask & (1u << i)) s += sizes[i];
    }
    if (s >= need && (best < 0 || s < best)) best = s;
  }
  return best;
}

// Records the engine and phase timelines and checks them independently of
// the simulator's own assertions.
struct TimelineAudit {
  struct Move {
    ObjectId object;
    Seconds start, end;
  };
  struct Run {
    int iteration, phase;
    Seconds start, end;
  };
  std::vector<Move> moves;
  std::vector<Run> runs;
  Granules min_free = std::numeric_limits<Granules>::max();
  std::size_t capacity_events = 0;

  SimulationObserver observer() {
    SimulationObserver o;
    o.on_migration = [this](const ObjectId& id, Direction, Seconds s, Seconds e) {
      moves.push_back({id, s, e});
    };
    o.on_phase = [this](int k, int p, Seconds s, Seconds e) { runs.push_back({k, p, s, e}); };
    o.on_capacity = [this](Granules f) {
      min_free = std::min(min_free, f);
      ++capacity_events;
    };
    return o;
  }

  // Number of (migration, phase) pairs where a referenced object was in
  // flight while the phase executed.
  std::size_t unsafe_overlaps(const Trace& trace) const {
    std::size_t bad = 0;
    for (const auto& m : moves) {
      for (const auto& r : runs) {
        if (!trace.phases[static_cast<std::size_t>(r.phase)].references(m.object)) continue;
        if (m.start < r.end && r.start < m.end) ++bad;
      }
    }
    return bad;
  }

  // The engine serves one request at a time.
  bool serial() const {
    for (std::size_t i = 1; i < moves.size(); ++i) {
      if (moves[i].start < moves[i - 1].end) return false;
    }
    return true;
  }
};

// Spread of generator settings and machines for property tests.
struct RandomCase {
  Trace trace;
  MachineConfig cfg;
};

inline RandomCase random_case(std::uint64_t seed, bool noisy) {
  std::mt19937_64 gen(seed * 0x9E3779B97F4A7C15ull + 7);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1)); };
  GeneratorSpec spec;
  spec.objects = pick(0, 9);
  spec.phases = pick(1, 7);
  spec.iterations = pick(2, 5);
  spec.min_size = static_cast<Bytes>(pick(1, 64)) * kMiB;
  spec.max_size = spec.min_size + static_cast<Bytes>(pick(0, 192)) * kMiB;
  spec.reference_probability = pick(2, 8) / 10.0;
  spec.streaming_share = pick(0, 6) / 10.0;
  spec.chasing_share = pick(0, 4) / 10.0;
  spec.partitionable_share = pick(0, 3) / 10.0;
  spec.static_estimates = pick(0, 1) == 1;
  spec.noise_sigma = noisy ? pick(0, 25) / 100.0 : 0.0;

  MachineConfig cfg;
  cfg.dram_capacity = static_cast<Bytes>(pick(32, 512)) * kMiB;
  cfg.mem_copy_bw = static_cast<double>(pick(1, 16)) * 0.5 * static_cast<double>(kGiB);
  cfg.nvm_bw = cfg.dram_bw * pick(2, 10) / 10.0;
  cfg.bw_peak_nvm = cfg.nvm_bw;
  cfg.nvm_lat = cfg.dram_lat * pick(10, 60) / 10.0;
  return {gen_synthetic(spec, cfg, seed), cfg};
}

}  // namespace fixtures
