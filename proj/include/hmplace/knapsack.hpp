#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hmplace/trace.hpp"

namespace hmplace {

struct KnapsackItem {
  ObjectId id;
  Seconds weight = 0.0;
  Granules size = 1;
};

// Exact 0-1 knapsack over granules. Items with weight <= 0 are dropped
// first. Among equal-weight optima the smaller total size wins, then the
// lexicographically smallest id set.
IdSet knapsack_solve(std::span<const KnapsackItem> items, Granules capacity);

struct SizedId {
  ObjectId id;
  Granules size = 0;
};

struct Cover {
  std::vector<ObjectId> ids;  // sorted
  Granules total = 0;
};

// Subset of candidates with the smallest total size that is >= need. Ties
// go to fewer members, then the lexicographically smallest id list. Returns
// nullopt when even all candidates together fall short.
std::optional<Cover> min_cover(std::span<const SizedId> candidates, Granules need);

}  // namespace hmplace
