#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hmplace/error.hpp"
#include "hmplace/knapsack.hpp"

using namespace hmplace;

namespace {

std::vector<KnapsackItem> random_items(std::mt19937_64& gen, bool dyadic) {
  const int n = static_cast<int>(gen() % 16);
  std::vector<KnapsackItem> items;
  for (int i = 0; i < n; ++i) {
    double w;
    if (dyadic) {
      w = static_cast<double>(static_cast<int>(gen() % 6400) - 800) / 64.0;
    } else {
      w = std::uniform_real_distribution<double>(-1.0, 10.0)(gen);
    }
    items.push_back({"o" + std::to_string(i), w, 1 + static_cast<Granules>(gen() % 20)});
  }
  return items;
}

}  // namespace

TEST_CASE("knapsack examples") {
  CHECK(knapsack_solve(std::vector<KnapsackItem>{{"A", 5, 1}}, 0).empty());
  const std::vector<KnapsackItem> abc = {{"A", 3, 2}, {"B", 2, 1}, {"C", 2, 1}};
  CHECK(knapsack_solve(abc, 2) == IdSet{"B", "C"});
  const std::vector<KnapsackItem> negative = {{"A", -1, 1}, {"B", 0, 1}};
  CHECK(knapsack_solve(negative, 10).empty());
  CHECK(knapsack_solve(std::vector<KnapsackItem>{}, 10).empty());
}

TEST_CASE("knapsack tie-breaks") {
  SUBCASE("equal weight prefers the smaller total size") {
    const std::vector<KnapsackItem> items = {{"A", 4, 3}, {"B", 4, 2}};
    CHECK(knapsack_solve(items, 3) == IdSet{"B"});
  }
  SUBCASE("then the lexicographically smallest set") {
    const std::vector<KnapsackItem> items = {{"d", 1, 1}, {"c", 1, 1}, {"b", 1, 1}, {"a", 1, 1}};
    CHECK(knapsack_solve(items, 2) == IdSet{"a", "b"});
  }
  SUBCASE("input order does not matter") {
    std::vector<KnapsackItem> items = {{"x", 2, 2}, {"y", 3, 3}, {"z", 5, 5}, {"w", 1, 1}};
    const auto first = knapsack_solve(items, 5);
    std::reverse(items.begin(), items.end());
    CHECK(knapsack_solve(items, 5) == first);
  }
  SUBCASE("duplicate ids are rejected") {
    const std::vector<KnapsackItem> dup = {{"A", 1, 1}, {"A", 2, 1}};
    CHECK_THROWS_AS(knapsack_solve(dup, 3), PlanningError);
  }
}

TEST_CASE("knapsack matches exhaustive search on exact weights") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const auto items = random_items(gen, true);
    const Granules cap = static_cast<Granules>(gen() % 60);
    const auto chosen = knapsack_solve(items, cap);
    Granules used = 0;
    for (const auto& it : items) {
      if (chosen.contains(it.id)) {
        used += it.size;
        CHECK(it.weight > 0);
      }
    }
    CHECK(used <= std::max<Granules>(cap, 0));
    CHECK(fixtures::weight_of(items, chosen) == fixtures::brute_knapsack(items, cap));
  }
}

TEST_CASE("knapsack matches exhaustive search on arbitrary weights") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 400; ++trial) {
    const auto items = random_items(gen, false);
    const Granules cap = static_cast<Granules>(gen() % 60);
    const auto chosen = knapsack_solve(items, cap);
    const double best = fixtures::brute_knapsack(items, cap);
    CHECK(fixtures::weight_of(items, chosen) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("min_cover") {
  const std::vector<SizedId> res = {{"A", 64}, {"B", 64}, {"C", 256}};
  auto c = min_cover(res, 100);
  REQUIRE(c);
  CHECK(c->ids == std::vector<ObjectId>{"A", "B"});
  CHECK(c->total == 128);
  c = min_cover(res, 200);
  REQUIRE(c);
  CHECK(c->ids == std::vector<ObjectId>{"C"});
  CHECK(min_cover(res, 0)->ids.empty());
  CHECK_FALSE(min_cover(res, 385));

  SUBCASE("equal totals prefer fewer victims, then smaller ids") {
    const std::vector<SizedId> r = {{"a", 1}, {"b", 1}, {"c", 2}, {"d", 2}};
    CHECK(min_cover(r, 2)->ids == std::vector<ObjectId>{"c"});
    const std::vector<SizedId> r2 = {{"z", 3}, {"y", 3}, {"x", 3}};
    CHECK(min_cover(r2, 3)->ids == std::vector<ObjectId>{"x"});
  }

  SUBCASE("oracle") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 300; ++trial) {
      const int n = static_cast<int>(gen() % 13);
      std::vector<SizedId> cands;
      std::vector<std::int64_t> sizes;
      for (int i = 0; i < n; ++i) {
        const auto s = static_cast<Granules>(1 + gen() % 50);
        cands.push_back({"r" + std::to_string(i), s});
        sizes.push_back(s);
      }
      const auto need = static_cast<Granules>(1 + gen() % 300);
      const auto got = min_cover(cands, need);
      const auto want = fixtures::brute_min_cover(sizes, need);
      if (want < 0) {
        CHECK_FALSE(got);
      } else {
        REQUIRE(got);
        CHECK(got->total == want);
      }
    }
  }
}
