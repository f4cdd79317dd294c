#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "fixtures.hpp"
#include "hmplace/benefit_cost.hpp"
#include "hmplace/error.hpp"
#include "hmplace/io.hpp"
#include "hmplace/knapsack.hpp"
#include "hmplace/planner.hpp"

using namespace hmplace;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome active_time_example() {
  const double t = active_access_time(1e5, 1e7, 10.0);
  return {t == 0.1, fmt("active time %.17g s", t)};
}

Outcome knapsack_oracle() {
  std::mt19937_64 gen(1);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(gen() % 16);
    std::vector<KnapsackItem> items;
    for (int i = 0; i < n; ++i) {
      // Multiples of 1/64 keep every subset sum exact in double precision.
      const double w = static_cast<double>(static_cast<int>(gen() % 6400) - 1000) / 64.0;
      items.push_back({"o" + std::to_string(i), w, 1 + static_cast<Granules>(gen() % 40)});
    }
    const auto cap = static_cast<Granules>(gen() % 150);
    const auto chosen = knapsack_solve(items, cap);
    if (fixtures::weight_of(items, chosen) != fixtures::brute_knapsack(items, cap)) ++mismatches;
  }
  return {mismatches == 0, fmt("%.0f of 1000 instances differ from enumeration", mismatches)};
}

Outcome eviction_oracle() {
  std::mt19937_64 gen(2);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    MachineConfig cfg;
    cfg.dram_capacity = 2 * kGiB;
    Trace t;
    t.phases = {fixtures::phase(0, 1.0, {})};
    std::vector<Resident> res;
    std::vector<std::int64_t> sizes;
    const int n = static_cast<int>(gen() % 13);
    for (int i = 0; i < n; ++i) {
      const auto mib = static_cast<Bytes>(1 + gen() % 160);
      const std::string id = "r" + std::to_string(i);
      t.objects.push_back({id, mib * kMiB, false, {}});
      res.push_back({id, mib * kMiB});
      sizes.push_back(static_cast<std::int64_t>(mib));
    }
    const auto need = static_cast<Bytes>(1 + gen() % 1000);
    const auto want = fixtures::brute_min_cover(sizes, static_cast<std::int64_t>(need));
    try {
      const auto plan = eviction_plan(need * kMiB, res, t, 0, cfg);
      if (want < 0 || plan.evicted_bytes != static_cast<Bytes>(want) * kMiB) ++mismatches;
    } catch (const InfeasibleEviction&) {
      if (want >= 0) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%.0f of 500 resident sets differ from enumeration", mismatches)};
}

Outcome rotation_counts() {
  const auto t = fixtures::rotation_trace();
  const auto cfg = fixtures::rotation_machine();
  const auto local = phase_local_search(t, cfg).migrations.size();
  const auto global = cross_global_search(t, cfg).migrations.size();
  return {local == 8 && global == 2,
          fmt("local %.0f, global %.0f migrations", static_cast<double>(local),
              static_cast<double>(global))};
}

Outcome dependency_safety() {
  std::size_t unsafe = 0, negative = 0, errors = 0, events = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto c = fixtures::random_case(seed, true);
    for (auto policy : {Policy::Managed, Policy::LocalOnly}) {
      fixtures::TimelineAudit audit;
      RunOptions o;
      o.observer = audit.observer();
      try {
        run_policy(c.trace, c.cfg, policy, o);
      } catch (const SimulationError&) {
        ++errors;
        continue;
      }
      unsafe += audit.unsafe_overlaps(c.trace);
      if (audit.capacity_events > 0 && audit.min_free < 0) ++negative;
      events += audit.capacity_events;
    }
  }
  return {unsafe == 0 && negative == 0 && errors == 0,
          fmt("%.0f unsafe overlaps, %.0f negative free-space runs, %.0f simulator errors",
              static_cast<double>(unsafe), static_cast<double>(negative),
              static_cast<double>(errors)) +
              " over " + std::to_string(events) + " capacity events"};
}

Outcome overlap_accounting() {
  auto hidden = fixtures::overlap_case(128 * kMiB, 4.0 * static_cast<double>(kGiB));
  SimulationOptions o;
  o.enforce_from_start = true;
  o.iterations = 1;
  const auto a = simulate(hidden.trace, hidden.plan, hidden.cfg, o);

  // Two idle 1 s phases form the window; the copy takes 1.25 of it.
  const Seconds window = 2.0;
  const Seconds move = 1.25 * window;
  auto late = fixtures::overlap_case(static_cast<Bytes>(move * 1024) * kMiB, static_cast<double>(kGiB));
  const auto b = simulate(late.trace, late.plan, late.cfg, o);
  const bool ok = a.pct_overlap == 100.0 && a.stall_time() == 0.0 &&
                  std::abs(b.stall_time() - 0.25 * window) <= 1e-9 &&
                  std::abs(b.stall_time() - (move - window)) <= 1e-9;
  return {ok, fmt("hidden copy: overlap %.1f%%, stall %.3g s; ", a.pct_overlap, a.stall_time()) +
                  fmt("long copy: stall %.12f s (window %.2f s, move %.2f s)", b.stall_time(), window,
                      move)};
}

Outcome policy_ordering() {
  int violations = 0, cases = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    for (bool noisy : {false, true}) {
      const auto c = fixtures::random_case(seed, noisy);
      const auto nvm = run_policy(c.trace, c.cfg, Policy::NvmOnly).total_time;
      const auto dram = run_policy(c.trace, c.cfg, Policy::DramOnly).total_time;
      const auto managed = run_policy(c.trace, c.cfg, Policy::Managed).total_time;
      ++cases;
      if (dram > managed + 1e-9 || managed > nvm + 1e-9) {
        ++violations;
        worst = std::max({worst, dram - managed, managed - nvm});
      }

      auto homo = c;
      homo.cfg.nvm_bw = homo.cfg.dram_bw;
      homo.cfg.nvm_lat = homo.cfg.dram_lat;
      const auto h_nvm = run_policy(homo.trace, homo.cfg, Policy::NvmOnly).total_time;
      const auto h_dram = run_policy(homo.trace, homo.cfg, Policy::DramOnly).total_time;
      const auto h_managed = run_policy(homo.trace, homo.cfg, Policy::Managed).total_time;
      ++cases;
      if (std::abs(h_nvm - h_dram) > 1e-9 || std::abs(h_nvm - h_managed) > 1e-9) {
        ++violations;
        worst = std::max({worst, std::abs(h_nvm - h_dram), std::abs(h_nvm - h_managed)});
      }
    }
  }
  return {violations == 0, fmt("%.0f of %.0f cases violate the ordering (worst excess %.3g s)",
                               violations, cases, worst)};
}

// Eight 1 s phases, each touching its own streaming and pointer-chasing
// object; DRAM holds four of the sixteen objects.
Trace gap_trace() {
  Trace t;
  t.iterations = 20;
  const MachineConfig cfg;
  for (int p = 0; p < 8; ++p) {
    const std::string s = "stream" + std::to_string(p);
    const std::string c = "chase" + std::to_string(p);
    t.objects.push_back({s, 64 * kMiB, false, {}});
    t.objects.push_back({c, 64 * kMiB, false, {}});
    const double stream_active = 0.5;
    const double chase_active = 0.37;
    t.phases.push_back(fixtures::phase(
        p, 1.0, {s, c},
        {{s, stream_active * cfg.bw_peak_nvm / static_cast<double>(cfg.cacheline_size),
          stream_active * 1e6},
         {c, chase_active / cfg.nvm_lat, chase_active * 1e6}}));
  }
  return t;
}

Outcome gap_narrowing() {
  const auto t = gap_trace();
  const MachineConfig cfg;
  const auto nvm = run_policy(t, cfg, Policy::NvmOnly).total_time;
  const auto dram = run_policy(t, cfg, Policy::DramOnly).total_time;
  const auto managed = run_policy(t, cfg, Policy::Managed).total_time;
  const double ratio = nvm / dram;
  const double gap = (managed - dram) / dram;
  return {ratio >= 2.0 && ratio <= 2.2 && gap <= 0.10,
          fmt("nvm/dram %.3fx, managed within %.2f%% of dram-only", ratio, gap * 100.0)};
}

Outcome adaptation_trigger() {
  const auto t = fixtures::rotation_trace(4);
  const auto cfg = fixtures::rotation_machine();
  RunOptions perturbed;
  perturbed.noise = NoiseTable{{1.0}, {1.0, 1.0, 1.2, 1.0, 1.0}, {1.0}, {1.0}};
  const int a = run_policy(t, cfg, Policy::Managed, perturbed).replans;
  RunOptions mild;
  mild.noise = NoiseTable{{1.05}, {1.05}, {1.05}, {1.05}};
  const int b = run_policy(t, cfg, Policy::Managed, mild).replans;
  return {a >= 1 && b == 0, fmt("1.2x on one phase: %.0f replans; 1.05x everywhere: %.0f", a, b)};
}

std::string full_run(std::uint64_t seed) {
  const MachineConfig cfg;
  GeneratorSpec spec;
  spec.noise_sigma = 0.15;
  spec.partitionable_share = 0.2;
  const auto t = gen_synthetic(spec, cfg, seed);
  std::vector<SimulationReport> reports;
  for (auto p : {Policy::NvmOnly, Policy::DramOnly, Policy::Managed, Policy::LocalOnly,
                 Policy::GlobalOnly}) {
    reports.push_back(run_policy(t, cfg, p));
  }
  const auto plan = plan_placement(t, cfg).plan;
  return io::dump(io::to_json(t)) + io::dump(io::to_json(plan)) +
         io::dump(io::to_json(std::span<const SimulationReport>(reports)));
}

Outcome determinism_round_trip() {
  int failures = 0;
  std::string notes;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) {
      ++failures;
      notes += std::string(" ") + what;
    }
  };
  for (std::uint64_t seed : {3u, 5u, 8u}) expect(full_run(seed) == full_run(seed), "report-bytes");

  const auto c = fixtures::random_case(29, true);
  auto trace = c.trace;
  if (!trace.objects.empty()) {
    trace.chunk_histograms[trace.objects[0].id] =
        std::vector<std::vector<double>>(trace.phases.size(), std::vector<double>{0.5, 0.5});
  }
  trace.per_iteration_overrides.push_back({1, 0, 0.9, 3e5, {}});
  expect(io::trace_from_json(io::to_json(trace)) == trace, "trace");

  const auto cfg = c.cfg;
  const auto back = io::machine_from_json(io::to_json(cfg));
  expect(io::dump(io::to_json(back)) == io::dump(io::to_json(cfg)), "machine");

  const auto planned = plan_placement(trace, cfg);
  for (const auto& p : {planned.plan, planned.local, planned.global}) {
    expect(io::plan_from_json(io::to_json(p)) == p, "plan");
  }
  const std::vector<SimulationReport> reports = {run_policy(trace, cfg, Policy::Managed),
                                                 run_policy(trace, cfg, Policy::NvmOnly)};
  expect(io::report_from_json(io::to_json(reports[0])) == reports[0], "report");
  expect(io::reports_from_json(io::to_json(std::span<const SimulationReport>(reports))) == reports,
         "reports");

  const std::vector<CalibrationPair> pairs = {{1.0, 1.5}, {0.25, 0.3}};
  const auto pb = io::calibration_from_json(io::to_json(std::span<const CalibrationPair>(pairs)));
  expect(pb.size() == 2 && pb[0].predicted == 1.0 && pb[1].measured == 0.3, "calibration");

  GeneratorSpec spec;
  spec.noise_sigma = 0.07;
  spec.max_size = 300 * kMiB;
  expect(io::dump(io::to_json(io::generator_from_json(io::to_json(spec)))) ==
             io::dump(io::to_json(spec)),
         "generator");
  return {failures == 0, failures == 0 ? std::string("reports byte-identical; all schemas round-trip")
                                       : "mismatch:" + notes};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"active-access time worked example", active_time_example},
      {"knapsack matches exhaustive search", knapsack_oracle},
      {"eviction matches exhaustive search", eviction_oracle},
      {"rotation migration counts", rotation_counts},
      {"dependency safety over 1000 traces", dependency_safety},
      {"overlap accounting", overlap_accounting},
      {"policy ordering", policy_ordering},
      {"gap narrowing", gap_narrowing},
      {"adaptation trigger", adaptation_trigger},
      {"determinism and round-trip", determinism_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failed;
    std::printf("%s %zu %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                r.detail.c_str(), secs);
  }
  return failed == 0 ? 0 : 1;
}
