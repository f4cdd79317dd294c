#include <doctest.h>

#include <numeric>

#include "fixtures.hpp"
#include "hmplace/benefit_cost.hpp"
#include "hmplace/error.hpp"
#include "hmplace/placement.hpp"

using namespace hmplace;
using fixtures::phase;

TEST_CASE("initial placement") {
  MachineConfig cfg;
  cfg.dram_capacity = 64 * kMiB;
  const std::vector<DataObject> objs = {{"A", 64 * kMiB, false, 1e9}, {"B", 64 * kMiB, false, 1e6}};
  CHECK(initial_placement(objs, cfg) == IdSet{"A"});
  const std::vector<DataObject> none = {{"A", 64 * kMiB, false, {}}, {"B", kMiB, false, {}}};
  CHECK(initial_placement(none, cfg).empty());
  cfg.dram_capacity = 1024 * kMiB;
  const std::vector<DataObject> mixed = {
      {"A", 64 * kMiB, false, 5.0}, {"B", 64 * kMiB, false, 1.0}, {"C", 64 * kMiB, false, {}}};
  CHECK(initial_placement(mixed, cfg) == IdSet{"A", "B"});
}

TEST_CASE("phase local search basics") {
  MachineConfig cfg;
  Trace t;
  t.objects = {{"x", 64 * kMiB, false, {}}};

  SUBCASE("one phase, one worthwhile object") {
    t.phases = {phase(0, 1.0, {"x"}, {{"x", 1e6, 5e5}})};
    const auto plan = phase_local_search(t, cfg);
    CHECK(plan.per_phase_residency == std::vector<IdSet>{{"x"}});
    REQUIRE(plan.migrations.size() == 1);
    CHECK(plan.migrations[0].object == "x");
    CHECK(plan.migrations[0].direction == Direction::ToDram);
    CHECK(plan.steady_migrations.empty());
    CHECK_NOTHROW(validate_plan(plan, t, cfg));
  }
  SUBCASE("nothing worth moving") {
    t.phases = {phase(0, 1.0, {"x"}), phase(1, 1.0, {})};
    const auto plan = phase_local_search(t, cfg);
    CHECK(plan.migrations.empty());
    CHECK(plan.steady_migrations.empty());
    CHECK(plan.per_phase_residency == std::vector<IdSet>{{}, {}});
  }
  SUBCASE("no phases") {
    CHECK_THROWS_AS(phase_local_search(t, cfg), PlanningError);
    CHECK_THROWS_AS(cross_global_search(t, cfg), PlanningError);
  }
}

TEST_CASE("three-object rotation") {
  const auto t = fixtures::rotation_trace();
  const auto cfg = fixtures::rotation_machine();

  const auto local = phase_local_search(t, cfg);
  CHECK(local.migrations.size() == 8);
  // Phase 4 evicts c, idle since phase 2, rather than a, used in phase 3.
  CHECK(local.per_phase_residency ==
        std::vector<IdSet>{{"a"}, {"a", "b"}, {"b", "c"}, {"a", "c"}, {"a", "b"}});
  CHECK_NOTHROW(validate_plan(local, t, cfg));

  const auto global = cross_global_search(t, cfg);
  CHECK(global.migrations.size() == 2);
  CHECK(global.steady_migrations.empty());
  for (const auto& s : global.per_phase_residency) CHECK(s == IdSet{"a", "b"});
  for (const auto& m : global.migrations) CHECK(m.trigger == 0);
  CHECK_NOTHROW(validate_plan(global, t, cfg));
}

TEST_CASE("global search") {
  MachineConfig cfg;
  cfg.dram_capacity = 128 * kMiB;
  Trace t;
  t.objects = {{"x", 64 * kMiB, false, {}}, {"huge", 512 * kMiB, true, {}}};
  t.phases = {phase(0, 1.0, {"x", "huge"}, {{"x", 1e6, 5e5}, {"huge", 1e7, 5e5}})};
  const auto plan = cross_global_search(t, cfg);
  CHECK(plan.per_phase_residency.front() == IdSet{"x"});
  CHECK(plan.migrations.size() == 1);

  SUBCASE("start objects are evicted before the first arrival") {
    Trace t2 = t;
    t2.objects.push_back({"cold", 96 * kMiB, false, {}});
    t2.phases.push_back(phase(1, 1.0, {"cold"}));
    const auto p = cross_global_search(t2, cfg, {"cold"});
    CHECK(p.per_phase_residency.front() == IdSet{"x"});
    REQUIRE(p.migrations.size() == 2);
    CHECK(p.migrations[0].direction == Direction::ToNvm);
    CHECK(p.migrations[1].direction == Direction::ToDram);
    CHECK_NOTHROW(validate_plan(p, t2, cfg));
  }
  SUBCASE("start objects that still fit stay") {
    Trace t2 = t;
    t2.objects.push_back({"warm", 32 * kMiB, false, {}});
    t2.phases.push_back(phase(1, 1.0, {"warm"}));
    const auto p = cross_global_search(t2, cfg, {"warm"});
    CHECK(p.per_phase_residency.front() == IdSet{"warm", "x"});
    CHECK(p.migrations.size() == 1);
  }
}

TEST_CASE("plans from random traces validate") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto c = fixtures::random_case(seed, false);
    if (c.trace.phases.empty()) continue;
    const IdSet start = initial_placement(c.trace.objects, c.cfg);
    for (const auto& plan : {phase_local_search(c.trace, c.cfg, start),
                             cross_global_search(c.trace, c.cfg, start),
                             hold_plan(c.trace, start)}) {
      CHECK_NOTHROW(validate_plan(plan, c.trace, c.cfg));
      CHECK(plan.initial_dram == start);
    }
  }
}

TEST_CASE("local selection is optimal for each phase") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const auto c = fixtures::random_case(seed, false);
    const auto plan = phase_local_search(c.trace, c.cfg);
    IdSet context;
    for (std::size_t p = 0; p < c.trace.phases.size(); ++p) {
      std::vector<KnapsackItem> items;
      for (const auto& id : c.trace.phases[p].referenced) {
        try {
          const auto est = estimate_movement(c.trace.object(id), static_cast<int>(p), {context},
                                             c.trace, c.cfg);
          if (est.weight > 0) items.push_back({id, est.weight, c.cfg.to_granules(c.trace.object(id).size)});
        } catch (const InfeasibleEviction&) {
        }
      }
      const auto& res = plan.per_phase_residency[p];
      CHECK(fixtures::weight_of(items, res) ==
            doctest::Approx(fixtures::brute_knapsack(items, c.cfg.capacity_granules())));
      context = res;
    }
  }
}

TEST_CASE("validate_plan rejects broken plans") {
  const auto t = fixtures::rotation_trace();
  const auto cfg = fixtures::rotation_machine();
  const auto good = phase_local_search(t, cfg);

  SUBCASE("capacity") {
    auto p = good;
    p.per_phase_residency[1] = {"a", "b", "c"};
    CHECK_THROWS_AS(validate_plan(p, t, cfg), PlanningError);
  }
  SUBCASE("trigger inside a referencing phase") {
    auto p = good;
    // Evicting "a" during phase 0 would overlap its use there.
    for (auto& m : p.migrations) {
      if (m.object == "a" && m.direction == Direction::ToNvm && m.target == 2) m.trigger = 0;
    }
    CHECK_THROWS_AS(validate_plan(p, t, cfg), PlanningError);
  }
  SUBCASE("missing migration") {
    auto p = good;
    p.migrations.pop_back();
    CHECK_THROWS_AS(validate_plan(p, t, cfg), PlanningError);
  }
  SUBCASE("wrapping entry migration") {
    auto p = good;
    p.migrations.front().wraps = true;
    CHECK_THROWS_AS(validate_plan(p, t, cfg), PlanningError);
  }
}

TEST_CASE("partitioning") {
  MachineConfig cfg;
  cfg.dram_capacity = 512 * kMiB;
  const DataObject big{"big", kGiB, true, {}};

  CHECK(partition_object(big, cfg, 256 * kMiB).size() == 4);
  const auto whole = partition_object({"fixed", kGiB, false, {}}, cfg, 256 * kMiB);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].id == "fixed");
  CHECK(whole[0].size == kGiB);

  const auto tail = partition_object({"t", 600 * kMiB, true, {}}, cfg, 256 * kMiB);
  REQUIRE(tail.size() == 3);
  CHECK(tail[0].id == "t#0");
  CHECK(tail[2].size == 88 * kMiB);
  CHECK(tail[2].offset == 512 * kMiB);

  // Default chunk is an eighth of DRAM; oversized requests clamp to DRAM.
  CHECK(partition_object(big, cfg).size() == 16);
  CHECK(partition_object(big, cfg, 4 * kGiB).size() == 2);

  SUBCASE("histogram split") {
    const auto chunks = partition_object(big, cfg, 256 * kMiB);
    const std::vector<double> hist = {0.7, 0.1, 0.1, 0.1};
    const auto f = chunk_fractions(big, chunks, hist);
    REQUIRE(f.size() == 4);
    CHECK(f[0] * 1e6 == doctest::Approx(7e5));
    CHECK(f[1] * 1e6 == doctest::Approx(1e5));
    const auto uniform = chunk_fractions(big, chunks, {});
    for (double x : uniform) CHECK(x == 0.25);
    // Histogram with finer slices than the chunks.
    const std::vector<double> fine = {1, 1, 0, 0, 0, 0, 2, 0};
    const auto g = chunk_fractions(big, chunks, fine);
    CHECK(g[0] == doctest::Approx(0.5));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(g[3] == doctest::Approx(0.5));
  }

  SUBCASE("trace rewrite conserves accesses") {
    Trace t;
    t.objects = {big, {"s", 64 * kMiB, false, {}}};
    t.phases = {phase(0, 1.0, {"big", "s"}, {{"big", 1e6, 4e5}, {"s", 10, 10}}),
                phase(1, 1.0, {"s"})};
    t.chunk_histograms["big"] = {{0.7, 0.1, 0.1, 0.1}, {}};
    const std::vector<PartitionRecord> recs = {{"big", 256 * kMiB}};
    const auto out = apply_partitioning(t, recs, cfg);
    CHECK(out.objects.size() == 5);
    CHECK(out.find_object("big") == nullptr);
    CHECK(out.phases[0].referenced == IdSet{"big#0", "big#1", "big#2", "big#3", "s"});
    double da = 0.0, swa = 0.0;
    for (const auto& a : out.phases[0].accesses) {
      if (a.object_id.rfind("big#", 0) == 0) {
        da += a.data_access;
        swa += a.samples_with_access;
      }
    }
    CHECK(da == doctest::Approx(1e6));
    CHECK(swa == doctest::Approx(4e5));
    CHECK(out.phases[0].access_for("big#0")->data_access == doctest::Approx(7e5));
    CHECK(out.chunk_histograms.empty());
    CHECK_THROWS_AS(apply_partitioning(t, std::vector<PartitionRecord>{{"s", kMiB}}, cfg),
                    PlanningError);
  }
}

TEST_CASE("steady schedule never triggers inside a referencing phase") {
  for (std::uint64_t seed = 200; seed < 320; ++seed) {
    const auto c = fixtures::random_case(seed, false);
    if (c.trace.phases.empty()) continue;
    const auto plan = phase_local_search(c.trace, c.cfg);
    const auto n = static_cast<int>(c.trace.phases.size());
    for (const auto& m : plan.steady_migrations) {
      const int from = m.wraps ? m.trigger - n : m.trigger;
      CHECK(from <= m.target);
      CHECK(m.target - from < n);
      for (int q = from; q < m.target; ++q) {
        CHECK_FALSE(c.trace.phases[static_cast<std::size_t>((q + n) % n)].references(m.object));
      }
    }
  }
}
