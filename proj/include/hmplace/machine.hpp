#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmplace {

using Seconds = double;
using Bytes = std::uint64_t;
using Granules = std::int64_t;
using BytesPerSecond = double;

inline constexpr Bytes kMiB = Bytes{1} << 20;
inline constexpr Bytes kGiB = Bytes{1} << 30;

// Hardware description of a two-tier DRAM + NVM main memory.
//
// Bandwidths are bytes/second, latencies seconds/access, capacities bytes.
// NVM is never faster than DRAM: nvm_bw <= dram_bw and nvm_lat >= dram_lat.
struct MachineConfig {
  BytesPerSecond dram_bw = 10e9;
  BytesPerSecond nvm_bw = 5e9;
  Seconds dram_lat = 100e-9;
  Seconds nvm_lat = 400e-9;
  BytesPerSecond mem_copy_bw = 4.0 * static_cast<double>(kGiB);
  Bytes dram_capacity = 256 * kMiB;
  Bytes cacheline_size = 64;
  BytesPerSecond bw_peak_nvm = 5e9;
  double t1_pct = 80.0;
  double t2_pct = 10.0;
  double cf_bw = 1.0;
  double cf_lat = 1.0;
  Bytes capacity_granule = kMiB;
  double reprofile_threshold = 0.10;
  // 0 selects dram_capacity / 8.
  Bytes chunk_size = 0;
  // Predicted phase time never drops below this fraction of the NVM baseline.
  double phase_time_floor = 0.05;
  // Fixed runtime overhead added to reports as a fraction of execution time.
  double overhead_fraction = 0.0;

  // Throws ValidationError naming the offending field.
  void validate() const;

  // Rounds dram_capacity down to a whole number of granules. Returns true
  // when the value changed.
  bool round_capacity();

  Granules capacity_granules() const;
  Granules to_granules(Bytes size) const;  // rounds up
  Bytes effective_chunk_size() const;
};

enum class Sensitivity { Bandwidth, Latency, Mixed };

std::string_view to_string(Sensitivity s);

// Sampled main-memory accesses attributed to one object during one phase.
struct AccessRecord {
  std::string object_id;
  double data_access = 0.0;
  double samples_with_access = 0.0;

  bool operator==(const AccessRecord&) const = default;
};

// Bandwidth the object consumes while it is actively being accessed.
// Throws NoAttributedSamples when samples_with_access is zero.
BytesPerSecond object_bandwidth(const AccessRecord& access, double samples_total,
                                Seconds phase_time, const MachineConfig& cfg);

// Active-access time: the share of the phase whose samples hit the object.
Seconds active_access_time(double samples_with_access, double samples_total,
                           Seconds phase_time);

Sensitivity classify_sensitivity(BytesPerSecond bw_obj, const MachineConfig& cfg);

struct CalibrationPair {
  Seconds predicted = 0.0;
  Seconds measured = 0.0;
};

// Mean measured/predicted ratio.
double calibrate_cf(std::span<const CalibrationPair> pairs);

}  // namespace hmplace
