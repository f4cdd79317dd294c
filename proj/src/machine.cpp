#include "hmplace/machine.hpp"

#include <algorithm>
#include <cmath>

#include "hmplace/error.hpp"

namespace hmplace {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ValidationError(std::string("machine.") + field + ": " + rule);
}

}  // namespace

void MachineConfig::validate() const {
  require(dram_bw > 0 && std::isfinite(dram_bw), "dram_bw", "must be positive");
  require(nvm_bw > 0 && std::isfinite(nvm_bw), "nvm_bw", "must be positive");
  require(dram_lat > 0 && std::isfinite(dram_lat), "dram_lat", "must be positive");
  require(nvm_lat > 0 && std::isfinite(nvm_lat), "nvm_lat", "must be positive");
  require(mem_copy_bw > 0 && std::isfinite(mem_copy_bw), "mem_copy_bw", "must be positive");
  require(bw_peak_nvm > 0 && std::isfinite(bw_peak_nvm), "bw_peak_nvm", "must be positive");
  require(cacheline_size > 0, "cacheline_size", "must be positive");
  require(capacity_granule > 0, "capacity_granule", "must be positive");
  require(dram_capacity > 0, "dram_capacity", "must be positive");
  require(dram_capacity % capacity_granule == 0, "dram_capacity",
          "must be a multiple of capacity_granule");
  require(nvm_bw <= dram_bw, "nvm_bw", "must not exceed dram_bw");
  require(nvm_lat >= dram_lat, "nvm_lat", "must not be below dram_lat");
  require(t2_pct > 0 && t2_pct < t1_pct && t1_pct <= 100, "t1_pct/t2_pct",
          "need 0 < t2_pct < t1_pct <= 100");
  require(cf_bw >= 0 && std::isfinite(cf_bw), "cf_bw", "must be non-negative");
  require(cf_lat >= 0 && std::isfinite(cf_lat), "cf_lat", "must be non-negative");
  require(reprofile_threshold > 0, "reprofile_threshold", "must be positive");
  require(phase_time_floor >= 0 && phase_time_floor <= 1, "phase_time_floor",
          "must lie in [0, 1]");
  require(overhead_fraction >= 0, "overhead_fraction", "must be non-negative");
}

bool MachineConfig::round_capacity() {
  if (capacity_granule == 0) return false;
  const Bytes rounded = dram_capacity - dram_capacity % capacity_granule;
  const bool changed = rounded != dram_capacity;
  dram_capacity = rounded;
  return changed;
}

Granules MachineConfig::capacity_granules() const {
  return static_cast<Granules>(dram_capacity / capacity_granule);
}

Granules MachineConfig::to_granules(Bytes size) const {
  return static_cast<Granules>((size + capacity_granule - 1) / capacity_granule);
}

Bytes MachineConfig::effective_chunk_size() const {
  const Bytes configured = chunk_size == 0 ? dram_capacity / 8 : chunk_size;
  return std::max<Bytes>(1, std::min(configured, dram_capacity));
}

std::string_view to_string(Sensitivity s) {
  switch (s) {
    case Sensitivity::Bandwidth: return "bandwidth";
    case Sensitivity::Latency: return "latency";
    case Sensitivity::Mixed: return "mixed";
  }
  return "unknown";
}

Seconds active_access_time(double samples_with_access, double samples_total,
                           Seconds phase_time) {
  return samples_with_access / samples_total * phase_time;
}

BytesPerSecond object_bandwidth(const AccessRecord& access, double samples_total,
                                Seconds phase_time, const MachineConfig& cfg) {
  if (!(samples_total > 0)) throw ValidationError("samples_total must be positive");
  if (!(phase_time > 0)) throw ValidationError("phase_time must be positive");
  if (access.data_access < 0) throw ValidationError("data_access must be non-negative");
  if (!(access.samples_with_access > 0)) {
    throw NoAttributedSamples("no attributed samples for object '" + access.object_id + "'");
  }
  if (access.samples_with_access > samples_total) {
    throw ValidationError("samples_with_access exceeds samples_total for object '" +
                          access.object_id + "'");
  }
  const double bytes = access.data_access * static_cast<double>(cfg.cacheline_size);
  return bytes / active_access_time(access.samples_with_access, samples_total, phase_time);
}

Sensitivity classify_sensitivity(BytesPerSecond bw_obj, const MachineConfig& cfg) {
  if (bw_obj >= cfg.t1_pct / 100.0 * cfg.bw_peak_nvm) return Sensitivity::Bandwidth;
  if (bw_obj < cfg.t2_pct / 100.0 * cfg.bw_peak_nvm) return Sensitivity::Latency;
  return Sensitivity::Mixed;
}

double calibrate_cf(std::span<const CalibrationPair> pairs) {
  if (pairs.empty()) throw CalibrationError("calibration needs at least one pair");
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (!(p.predicted > 0) || !(p.measured > 0) || !std::isfinite(p.predicted) ||
        !std::isfinite(p.measured)) {
      throw CalibrationError("calibration times must be positive and finite");
    }
    sum += p.measured / p.predicted;
  }
  return sum / static_cast<double>(pairs.size());
}

}  // namespace hmplace
