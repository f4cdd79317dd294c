#pragma once

#include <cstdint>

#include "hmplace/trace.hpp"

namespace hmplace {

enum class Archetype { Streaming, Chasing, Idle };

std::string_view to_string(Archetype a);

// Parameters for seeded trace generation. Shares pick each object's
// archetype; whatever is left after streaming and chasing is idle.
struct GeneratorSpec {
  int objects = 6;
  int phases = 5;
  int iterations = 3;
  Bytes min_size = 16 * kMiB;
  Bytes max_size = 128 * kMiB;
  Seconds min_phase_time = 0.5;
  Seconds max_phase_time = 2.0;
  double streaming_share = 0.4;
  double chasing_share = 0.4;
  double reference_probability = 0.5;
  double partitionable_share = 0.0;
  bool static_estimates = false;
  // Per-phase noise factors drawn from [1 - sigma, 1 + sigma]; 0 disables.
  double noise_sigma = 0.0;
  double samples_per_second = 1e6;

  void validate() const;
};

// Streaming objects run near bw_peak_nvm while active; chasing objects issue
// one access per NVM latency. Active shares within a phase stay below 90%
// of its baseline so every placement keeps a positive phase time. Object ids
// carry the archetype: "stream3", "chase0", "idle5".
Trace gen_synthetic(const GeneratorSpec& spec, const MachineConfig& cfg, std::uint64_t seed);

}  // namespace hmplace
