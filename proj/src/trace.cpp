#include "hmplace/trace.hpp"

#include <cmath>

#include "hmplace/error.hpp"

namespace hmplace {

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ValidationError(field + ": " + rule);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0; }

void check_accesses(const std::vector<AccessRecord>& accesses, const IdSet& referenced,
                    double samples_total, const std::string& where) {
  IdSet seen;
  for (const auto& a : accesses) {
    const std::string field = where + ".accesses[" + a.object_id + "]";
    require(referenced.contains(a.object_id), field, "object must appear in referenced");
    require(seen.insert(a.object_id).second, field, "duplicate access record");
    require(std::isfinite(a.data_access) && a.data_access >= 0, field + ".data_access",
            "must be non-negative");
    require(std::isfinite(a.samples_with_access) && a.samples_with_access >= 0,
            field + ".samples_with_access", "must be non-negative");
    require(a.samples_with_access <= samples_total, field + ".samples_with_access",
            "must not exceed samples_total");
    require(a.data_access == 0 || a.samples_with_access > 0, field + ".samples_with_access",
            "must be positive when data_access is positive");
  }
}

}  // namespace

std::string_view to_string(PhaseKind k) { return k == PhaseKind::Comm ? "comm" : "compute"; }

const AccessRecord* PhaseProfile::access_for(const ObjectId& id) const {
  for (const auto& a : accesses) {
    if (a.object_id == id) return &a;
  }
  return nullptr;
}

const DataObject* Trace::find_object(const ObjectId& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const DataObject& Trace::object(const ObjectId& id) const {
  const auto* o = find_object(id);
  if (o == nullptr) throw ValidationError("unknown object '" + id + "'");
  return *o;
}

double Trace::noise(int iteration, int phase) const {
  if (per_iteration_noise.empty()) return 1.0;
  const auto& entry = per_iteration_noise.at(static_cast<std::size_t>(iteration));
  return entry.size() == 1 ? entry.front() : entry.at(static_cast<std::size_t>(phase));
}

std::vector<PhaseProfile> Trace::phases_for_iteration(int iteration) const {
  std::vector<PhaseProfile> out = phases;
  for (const auto& ov : per_iteration_overrides) {
    if (ov.iteration != iteration) continue;
    auto& ph = out.at(static_cast<std::size_t>(ov.phase));
    if (ov.baseline_time) ph.baseline_time = *ov.baseline_time;
    if (ov.samples_total) ph.samples_total = *ov.samples_total;
    ph.accesses = ov.accesses;
  }
  return out;
}

void Trace::validate() const {
  require(iterations >= 2, "trace.iterations", "must be at least 2");

  IdSet ids;
  for (const auto& o : objects) {
    require(!o.id.empty(), "trace.objects", "object id must be non-empty");
    require(ids.insert(o.id).second, "trace.objects[" + o.id + "]", "duplicate id");
    require(o.size > 0, "trace.objects[" + o.id + "].size", "must be positive");
    if (o.static_ref_estimate) {
      require(std::isfinite(*o.static_ref_estimate) && *o.static_ref_estimate >= 0,
              "trace.objects[" + o.id + "].static_ref_estimate", "must be non-negative");
    }
  }

  const auto phase_count = static_cast<int>(phases.size());
  for (int p = 0; p < phase_count; ++p) {
    const auto& ph = phases[static_cast<std::size_t>(p)];
    const std::string where = "trace.phases[" + std::to_string(p) + "]";
    require(ph.id == p, where + ".id", "must equal the phase position");
    require(finite_positive(ph.baseline_time), where + ".baseline_time", "must be positive");
    require(finite_positive(ph.samples_total), where + ".samples_total", "must be positive");
    for (const auto& r : ph.referenced) {
      require(ids.contains(r), where + ".referenced[" + r + "]", "unknown object");
    }
    check_accesses(ph.accesses, ph.referenced, ph.samples_total, where);
  }

  if (!per_iteration_noise.empty()) {
    require(static_cast<int>(per_iteration_noise.size()) == iterations,
            "trace.per_iteration_noise", "length must equal iterations");
    for (std::size_t k = 0; k < per_iteration_noise.size(); ++k) {
      const auto& entry = per_iteration_noise[k];
      const std::string where = "trace.per_iteration_noise[" + std::to_string(k) + "]";
      require(entry.size() == 1 || entry.size() == phases.size(), where,
              "must be one factor or one factor per phase");
      for (double f : entry) require(finite_positive(f), where, "factors must be positive");
    }
  }

  std::set<std::pair<int, int>> overridden;
  for (const auto& ov : per_iteration_overrides) {
    const std::string where = "trace.per_iteration_overrides[" + std::to_string(ov.iteration) +
                              "," + std::to_string(ov.phase) + "]";
    require(ov.iteration >= 0 && ov.iteration < iterations, where + ".iteration",
            "out of range");
    require(ov.phase >= 0 && ov.phase < phase_count, where + ".phase", "out of range");
    require(overridden.insert({ov.iteration, ov.phase}).second, where, "duplicate override");
    if (ov.baseline_time) {
      require(finite_positive(*ov.baseline_time), where + ".baseline_time", "must be positive");
    }
    if (ov.samples_total) {
      require(finite_positive(*ov.samples_total), where + ".samples_total", "must be positive");
    }
    const auto& ph = phases[static_cast<std::size_t>(ov.phase)];
    check_accesses(ov.accesses, ph.referenced, ov.samples_total.value_or(ph.samples_total),
                   where);
  }

  for (const auto& [id, per_phase] : chunk_histograms) {
    const std::string where = "trace.chunk_histograms[" + id + "]";
    require(ids.contains(id), where, "unknown object");
    require(per_phase.size() == phases.size(), where, "needs one entry per phase");
    for (const auto& hist : per_phase) {
      double sum = 0.0;
      for (double f : hist) {
        require(std::isfinite(f) && f >= 0, where, "fractions must be non-negative");
        sum += f;
      }
      require(hist.empty() || sum > 0, where, "fractions must not all be zero");
    }
  }
}

}  // namespace hmplace
