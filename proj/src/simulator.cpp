#include "hmplace/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hmplace/benefit_cost.hpp"
#include "hmplace/error.hpp"

namespace hmplace {

PhaseTime predict_phase_time(const PhaseProfile& phase, const IdSet& dram,
                             const MachineConfig& cfg) {
  Seconds saved = 0.0;
  for (const auto& a : phase.accesses) {
    if (dram.contains(a.object_id)) saved += phase_benefit(phase, a.object_id, cfg).benefit;
  }
  const Seconds floor = cfg.phase_time_floor * phase.baseline_time;
  const Seconds t = phase.baseline_time - saved;
  if (t < floor) return {floor, true};
  return {t, false};
}

Seconds SimulationReport::stall_time() const {
  Seconds total = 0.0;
  for (const auto& s : stalls) total += s.wait;
  return total;
}

Seconds SimulationReport::stall_at(int iteration, int phase) const {
  for (const auto& s : stalls) {
    if (s.iteration == iteration && s.phase == phase) return s.wait;
  }
  return 0.0;
}

namespace {

struct Request {
  ObjectId object;
  Direction direction;
  Bytes size;
  Granules granules;
  long abs_target;
  Seconds start;
  Seconds end;
};

class Simulation {
 public:
  Simulation(const Trace& trace, const PlacementPlan& plan, const MachineConfig& cfg,
             const SimulationOptions& opt)
      : trace_(trace),
        cfg_(cfg),
        opt_(opt),
        active_(plan),
        phase_count_(static_cast<long>(trace.phases.size())),
        iterations_(opt.iterations.value_or(trace.iterations)),
        plan_first_iter_(opt.enforce_from_start ? 0 : 1),
        expected_phases_(trace.phases),
        cap_g_(cfg.capacity_granules()) {
    noise_ = opt.noise ? *opt.noise : trace.per_iteration_noise;
    if (!noise_.empty()) {
      if (static_cast<int>(noise_.size()) != iterations_) {
        throw SimulationError("noise table needs one entry per iteration");
      }
      for (const auto& row : noise_) {
        if (row.size() != 1 && static_cast<long>(row.size()) != phase_count_) {
          throw SimulationError("noise entries need one factor or one per phase");
        }
      }
    }
    if (opt.enforce_capacity) {
      try {
        validate_plan(plan, trace, cfg);
      } catch (const PlanningError& e) {
        throw SimulationError(std::string("invalid plan: ") + e.what());
      }
    }
    dram_ = plan.initial_dram;
    projected_ = dram_;
    for (const auto& id : dram_) engine_used_g_ += cfg.to_granules(trace.object(id).size);
    check_capacity();
  }

  SimulationReport run() {
    report_.policy = opt_.policy;
    report_.per_phase_times.assign(static_cast<std::size_t>(iterations_),
                                   std::vector<Seconds>(static_cast<std::size_t>(phase_count_)));
    for (int k = 0; k < iterations_; ++k) run_iteration(k);

    clock_ = std::max(clock_, engine_free_at_);
    settle();
    if (!pending_.empty()) throw SimulationError("migrations outstanding at end of run");

    Seconds exec = 0.0;
    for (const auto& row : report_.per_phase_times) {
      for (Seconds t : row) exec += t;
    }
    const Seconds stalled = report_.stall_time();
    report_.overhead_time = cfg_.overhead_fraction * exec;
    report_.total_time = exec + stalled + report_.overhead_time;
    if (report_.engine_busy_time > 0) {
      report_.pct_overlap = std::clamp(
          (report_.engine_busy_time - stalled) / report_.engine_busy_time * 100.0, 0.0, 100.0);
    }
    if (report_.clamp_hits > 0) {
      report_.warnings.push_back("phase time floor applied " +
                                 std::to_string(report_.clamp_hits) + " times");
    }
    return report_;
  }

 private:
  double noise(int k, int p) const {
    if (noise_.empty()) return 1.0;
    const auto& row = noise_[static_cast<std::size_t>(k)];
    return row.size() == 1 ? row.front() : row[static_cast<std::size_t>(p)];
  }

  void check_capacity() {
    if (!opt_.enforce_capacity) return;
    const Granules free = cap_g_ - engine_used_g_;
    if (free < 0) throw SimulationError("DRAM capacity exceeded");
    if (opt_.observer.on_capacity) opt_.observer.on_capacity(free);
  }

  void enqueue(const Migration& m, long abs_target) {
    const auto& obj = trace_.object(m.object);
    const bool inbound = m.direction == Direction::ToDram;
    if (inbound == projected_.contains(m.object)) {
      throw SimulationError("plan moves '" + m.object + "' " + std::string(to_string(m.direction)) +
                            " but it is already there");
    }
    Request r{m.object, m.direction, obj.size, cfg_.to_granules(obj.size), abs_target, 0.0, 0.0};
    r.start = std::max(clock_, engine_free_at_);
    r.end = r.start + static_cast<double>(r.size) / cfg_.mem_copy_bw;
    engine_free_at_ = r.end;
    report_.engine_busy_time += r.end - r.start;

    // The engine is serial, so DRAM usage evolves in request order.
    if (inbound) {
      engine_used_g_ += r.granules;
      projected_.insert(m.object);
    } else {
      projected_.erase(m.object);
    }
    check_capacity();
    if (!inbound) {
      engine_used_g_ -= r.granules;
      check_capacity();
    }
    pending_.push_back(std::move(r));
  }

  // Blocks until every request due by this phase, or touching an object the
  // phase references, has completed.
  void wait_for(long abs_phase, const PhaseProfile& phase) {
    for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) {
      if (it->abs_target <= abs_phase || phase.references(it->object)) {
        clock_ = std::max(clock_, it->end);
        return;
      }
    }
  }

  void settle() {
    while (!pending_.empty() && pending_.front().end <= clock_) {
      const auto& r = pending_.front();
      if (r.direction == Direction::ToDram) dram_.insert(r.object);
      else dram_.erase(r.object);
      ++report_.migrations_count;
      report_.migrated_bytes += r.size;
      if (opt_.observer.on_migration) opt_.observer.on_migration(r.object, r.direction, r.start, r.end);
      pending_.pop_front();
    }
  }

  void enqueue_triggered(int k, int p) {
    const long base = static_cast<long>(k) * phase_count_;
    const auto& now = k == plan_first_iter_ ? active_.migrations : active_.steady_migrations;
    for (const auto& m : now) {
      if (m.trigger == p && !m.wraps) enqueue(m, base + m.target);
    }
    if (k + 1 < iterations_) {
      for (const auto& m : active_.steady_migrations) {
        if (m.trigger == p && m.wraps) enqueue(m, base + phase_count_ + m.target);
      }
    }
  }

  void run_iteration(int k) {
    const auto phases = trace_.phases_for_iteration(k);
    const bool enforcing = k >= plan_first_iter_;
    bool deviated = false;

    for (int p = 0; p < phase_count_; ++p) {
      const auto& phase = phases[static_cast<std::size_t>(p)];
      const long abs = static_cast<long>(k) * phase_count_ + p;
      const Seconds arrived = clock_;
      wait_for(abs, phase);
      if (enforcing) enqueue_triggered(k, p);
      wait_for(abs, phase);
      const Seconds waited = clock_ - arrived;
      if (waited > 0) report_.stalls.push_back({k, p, waited});
      settle();

      for (const auto& r : pending_) {
        if (phase.references(r.object)) {
          throw SimulationError("'" + r.object + "' is in flight during phase " +
                                std::to_string(p) + " of iteration " + std::to_string(k) +
                                ", which references it");
        }
      }

      const auto predicted = predict_phase_time(phase, dram_, cfg_);
      if (predicted.clamped) ++report_.clamp_hits;
      const Seconds duration = predicted.time * noise(k, p);
      if (enforcing && opt_.adapt) {
        const Seconds expected =
            predict_phase_time(expected_phases_[static_cast<std::size_t>(p)], dram_, cfg_).time;
        if (std::abs(duration - expected) > cfg_.reprofile_threshold * expected) deviated = true;
      }
      if (opt_.observer.on_phase) opt_.observer.on_phase(k, p, clock_, clock_ + duration);
      report_.per_phase_times[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] = duration;
      clock_ += duration;
    }

    if (deviated && k + 1 < iterations_ && opt_.replanner) replan(k, phases);
  }

  // Re-profiles with what iteration k actually looked like and hands the
  // next iteration to a fresh plan.
  void replan(int k, std::vector<PhaseProfile> phases) {
    // A slower or faster phase did proportionally more or less work, so
    // counts scale with time and per-object bandwidths stay put.
    for (std::size_t p = 0; p < phases.size(); ++p) {
      const double f = noise(k, static_cast<int>(p));
      phases[p].baseline_time *= f;
      phases[p].samples_total *= f;
      for (auto& a : phases[p].accesses) {
        a.data_access *= f;
        a.samples_with_access *= f;
      }
    }
    Trace profile = trace_;
    profile.phases = phases;
    profile.per_iteration_noise.clear();
    profile.per_iteration_overrides.clear();
    const int remaining = iterations_ - (k + 1);
    profile.iterations = std::max(2, remaining);

    PlacementPlan next = opt_.replanner(profile, projected_, remaining);
    if (opt_.enforce_capacity) {
      try {
        validate_plan(next, profile, cfg_);
      } catch (const PlanningError& e) {
        throw SimulationError(std::string("invalid replanned plan: ") + e.what());
      }
    }
    active_ = std::move(next);
    plan_first_iter_ = k + 1;
    expected_phases_ = std::move(phases);
    ++report_.replans;
  }

  const Trace& trace_;
  const MachineConfig& cfg_;
  const SimulationOptions& opt_;
  PlacementPlan active_;
  long phase_count_;
  int iterations_;
  int plan_first_iter_;
  std::vector<PhaseProfile> expected_phases_;
  NoiseTable noise_;

  Granules cap_g_;
  Granules engine_used_g_ = 0;
  Seconds clock_ = 0.0;
  Seconds engine_free_at_ = 0.0;
  IdSet dram_;
  IdSet projected_;
  std::deque<Request> pending_;
  SimulationReport report_;
};

}  // namespace

SimulationReport simulate(const Trace& trace, const PlacementPlan& plan,
                          const MachineConfig& cfg, const SimulationOptions& options) {
  if (static_cast<long>(plan.per_phase_residency.size()) != static_cast<long>(trace.phases.size())) {
    throw SimulationError("plan covers " + std::to_string(plan.per_phase_residency.size()) +
                          " phases but the trace has " + std::to_string(trace.phases.size()));
  }
  Simulation sim(trace, plan, cfg, options);
  return sim.run();
}

Seconds predict_plan_total(const Trace& trace, const PlacementPlan& plan,
                           const MachineConfig& cfg, int iterations) {
  if (iterations <= 0) return 0.0;
  Trace quiet = trace;
  quiet.per_iteration_noise.clear();
  quiet.per_iteration_overrides.clear();
  SimulationOptions opt;
  opt.enforce_from_start = true;
  opt.iterations = iterations;
  return simulate(quiet, plan, cfg, opt).total_time;
}

}  // namespace hmplace
