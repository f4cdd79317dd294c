#include "hmplace/knapsack.hpp"

#include <algorithm>
#include <limits>

#include "hmplace/error.hpp"

namespace hmplace {

namespace {

struct Value {
  double weight = 0.0;
  Granules size = 0;
};

// Strictly better, or tied with the include option preferred by the caller.
bool better_or_equal(const Value& a, const Value& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.size <= b.size;
}

template <typename T>
std::vector<T> sorted_by_id(std::span<const T> in) {
  std::vector<T> out(in.begin(), in.end());
  std::sort(out.begin(), out.end(), [](const T& a, const T& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) throw PlanningError("duplicate item id '" + out[i].id + "'");
  }
  return out;
}

}  // namespace

IdSet knapsack_solve(std::span<const KnapsackItem> items, Granules capacity) {
  if (capacity <= 0) return {};
  std::vector<KnapsackItem> pool;
  for (const auto& it : sorted_by_id(items)) {
    if (it.size < 1) throw PlanningError("knapsack item '" + it.id + "' has size < 1");
    if (it.weight > 0 && it.size <= capacity) pool.push_back(it);
  }
  if (pool.empty()) return {};

  Granules total = 0;
  for (const auto& it : pool) total += it.size;
  const auto cap = static_cast<std::size_t>(std::min(capacity, total));
  const std::size_t n = pool.size();
  const std::size_t width = cap + 1;

  // best[i * width + c]: optimum over items i.. with capacity c.
  std::vector<Value> best((n + 1) * width);
  for (std::size_t i = n; i-- > 0;) {
    const auto s = static_cast<std::size_t>(pool[i].size);
    const Value* next = &best[(i + 1) * width];
    Value* row = &best[i * width];
    for (std::size_t c = 0; c <= cap; ++c) {
      row[c] = next[c];
      if (s <= c) {
        const Value take{pool[i].weight + next[c - s].weight,
                         pool[i].size + next[c - s].size};
        if (better_or_equal(take, row[c])) row[c] = take;
      }
    }
  }

  IdSet chosen;
  std::size_t c = cap;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(pool[i].size);
    if (s > c) continue;
    const Value& here = best[i * width + c];
    const Value& rest = best[(i + 1) * width + c - s];
    if (here.weight == pool[i].weight + rest.weight && here.size == pool[i].size + rest.size) {
      chosen.insert(pool[i].id);
      c -= s;
    }
  }
  return chosen;
}

std::optional<Cover> min_cover(std::span<const SizedId> candidates, Granules need) {
  if (need <= 0) return Cover{};
  const auto pool = sorted_by_id(candidates);
  Granules total = 0;
  for (const auto& c : pool) {
    if (c.size < 0) throw PlanningError("negative size for '" + c.id + "'");
    total += c.size;
  }
  if (total < need) return std::nullopt;

  constexpr int kUnreachable = std::numeric_limits<int>::max();
  const std::size_t n = pool.size();
  const auto width = static_cast<std::size_t>(total) + 1;

  // fewest[i * width + s]: fewest members of items i.. summing to exactly s.
  std::vector<int> fewest((n + 1) * width, kUnreachable);
  fewest[n * width] = 0;
  for (std::size_t i = n; i-- > 0;) {
    const auto sz = static_cast<std::size_t>(pool[i].size);
    const int* next = &fewest[(i + 1) * width];
    int* row = &fewest[i * width];
    for (std::size_t s = 0; s < width; ++s) {
      row[s] = next[s];
      if (sz <= s && next[s - sz] != kUnreachable) row[s] = std::min(row[s], next[s - sz] + 1);
    }
  }

  auto target = static_cast<std::size_t>(need);
  while (fewest[target] == kUnreachable) ++target;

  Cover cover;
  cover.total = static_cast<Granules>(target);
  std::size_t remaining = target;
  int count = fewest[target];
  for (std::size_t i = 0; i < n && count > 0; ++i) {
    const auto sz = static_cast<std::size_t>(pool[i].size);
    if (sz <= remaining && fewest[(i + 1) * width + remaining - sz] == count - 1) {
      cover.ids.push_back(pool[i].id);
      remaining -= sz;
      --count;
    }
  }
  return cover;
}

}  // namespace hmplace
