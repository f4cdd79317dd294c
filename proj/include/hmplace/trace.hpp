#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hmplace/machine.hpp"

namespace hmplace {

using ObjectId = std::string;
using IdSet = std::set<ObjectId>;

struct DataObject {
  ObjectId id;
  Bytes size = 0;
  bool partitionable = false;
  std::optional<double> static_ref_estimate;

  bool operator==(const DataObject&) const = default;
};

enum class PhaseKind { Compute, Comm };

// One program phase of the profiled iteration. baseline_time is measured
// with every target object in NVM.
struct PhaseProfile {
  int id = 0;
  PhaseKind kind = PhaseKind::Compute;
  Seconds baseline_time = 0.0;
  double samples_total = 0.0;
  std::vector<AccessRecord> accesses;
  IdSet referenced;

  const AccessRecord* access_for(const ObjectId& id) const;
  bool references(const ObjectId& id) const { return referenced.contains(id); }

  bool operator==(const PhaseProfile&) const = default;
};

// Replacement access profile for one phase of one iteration. Referenced sets
// are structural and never change; only timing and counts are overridden.
struct PhaseOverride {
  int iteration = 0;
  int phase = 0;
  std::optional<Seconds> baseline_time;
  std::optional<double> samples_total;
  std::vector<AccessRecord> accesses;

  bool operator==(const PhaseOverride&) const = default;
};

struct Trace {
  std::vector<DataObject> objects;
  std::vector<PhaseProfile> phases;
  int iterations = 2;
  // One entry per iteration: a single uniform factor or one factor per phase.
  std::vector<std::vector<double>> per_iteration_noise;
  std::vector<PhaseOverride> per_iteration_overrides;
  // object id -> per phase access fractions over equal-width slices of the
  // object (an empty list means uniform for that phase).
  std::map<ObjectId, std::vector<std::vector<double>>> chunk_histograms;

  std::size_t phase_count() const { return phases.size(); }
  const DataObject* find_object(const ObjectId& id) const;
  const DataObject& object(const ObjectId& id) const;  // throws if absent

  double noise(int iteration, int phase) const;

  // Phases of the given iteration with overrides applied.
  std::vector<PhaseProfile> phases_for_iteration(int iteration) const;

  // Throws ValidationError naming the field and the violated rule.
  void validate() const;

  bool operator==(const Trace&) const = default;
};

std::string_view to_string(PhaseKind k);

}  // namespace hmplace
