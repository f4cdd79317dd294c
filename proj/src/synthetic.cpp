#include "hmplace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hmplace/error.hpp"

namespace hmplace {

namespace {

// std::uniform_real_distribution is not portable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::Streaming: return "stream";
    case Archetype::Chasing: return "chase";
    case Archetype::Idle: return "idle";
  }
  return "idle";
}

void GeneratorSpec::validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ValidationError("generator." + field + ": " + rule);
  };
  require(objects >= 0, "objects", "must be non-negative");
  require(phases >= 1, "phases", "must be at least 1");
  require(iterations >= 2, "iterations", "must be at least 2");
  require(min_size >= 1, "min_size", "must be positive");
  require(max_size >= min_size, "max_size", "must be at least min_size");
  require(min_phase_time > 0, "min_phase_time", "must be positive");
  require(max_phase_time >= min_phase_time, "max_phase_time", "must be at least min_phase_time");
  require(streaming_share >= 0 && chasing_share >= 0 && streaming_share + chasing_share <= 1,
          "streaming_share", "shares must be non-negative and sum to at most 1");
  require(reference_probability >= 0 && reference_probability <= 1, "reference_probability",
          "must be within [0, 1]");
  require(partitionable_share >= 0 && partitionable_share <= 1, "partitionable_share",
          "must be within [0, 1]");
  require(noise_sigma >= 0 && noise_sigma < 1, "noise_sigma", "must be within [0, 1)");
  require(samples_per_second > 0, "samples_per_second", "must be positive");
}

Trace gen_synthetic(const GeneratorSpec& spec, const MachineConfig& cfg, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Trace t;
  t.iterations = spec.iterations;

  std::vector<Archetype> kinds;
  const Bytes lo = std::max<Bytes>(1, (spec.min_size + kMiB - 1) / kMiB);
  const Bytes hi = std::max(lo, spec.max_size / kMiB);
  for (int i = 0; i < spec.objects; ++i) {
    const double u = rng.uniform();
    const Archetype a = u < spec.streaming_share                        ? Archetype::Streaming
                        : u < spec.streaming_share + spec.chasing_share ? Archetype::Chasing
                                                                        : Archetype::Idle;
    kinds.push_back(a);
    const auto span = static_cast<double>(hi - lo + 1);
    const Bytes mib = std::min(hi, lo + static_cast<Bytes>(rng.uniform() * span));
    DataObject obj;
    obj.id = std::string(to_string(a)) + std::to_string(i);
    obj.size = mib * kMiB;
    obj.partitionable = rng.uniform() < spec.partitionable_share;
    t.objects.push_back(obj);
  }

  std::vector<double> estimates(t.objects.size(), 0.0);
  for (int p = 0; p < spec.phases; ++p) {
    PhaseProfile ph;
    ph.id = p;
    ph.kind = p % 2 == 0 ? PhaseKind::Compute : PhaseKind::Comm;
    ph.baseline_time = rng.uniform(spec.min_phase_time, spec.max_phase_time);
    ph.samples_total = ph.baseline_time * spec.samples_per_second;

    struct Active {
      std::size_t index;
      double share;
      double intensity;
    };
    std::vector<Active> active;
    for (std::size_t i = 0; i < t.objects.size(); ++i) {
      if (rng.uniform() >= spec.reference_probability) continue;
      ph.referenced.insert(t.objects[i].id);
      if (kinds[i] == Archetype::Idle) continue;
      const double share = rng.uniform(0.05, 0.5);
      const double intensity =
          kinds[i] == Archetype::Streaming ? rng.uniform(0.85, 1.0) : rng.uniform(0.5, 0.9);
      active.push_back({i, share, intensity});
    }
    double busy = 0.0;
    for (const auto& a : active) busy += a.share * a.intensity;
    const double scale = busy > 0.9 ? 0.9 / busy : 1.0;

    for (const auto& a : active) {
      const double f = a.share * scale;
      const Seconds active_time = a.intensity * f * ph.baseline_time;
      AccessRecord rec;
      rec.object_id = t.objects[a.index].id;
      rec.data_access = kinds[a.index] == Archetype::Streaming
                            ? active_time * cfg.bw_peak_nvm / static_cast<double>(cfg.cacheline_size)
                            : active_time / cfg.nvm_lat;
      rec.samples_with_access = f * ph.samples_total;
      estimates[a.index] += rec.data_access;
      ph.accesses.push_back(rec);
    }
    t.phases.push_back(std::move(ph));
  }

  if (spec.static_estimates) {
    for (std::size_t i = 0; i < t.objects.size(); ++i) t.objects[i].static_ref_estimate = estimates[i];
  }

  if (spec.noise_sigma > 0) {
    for (int k = 0; k < spec.iterations; ++k) {
      std::vector<double> row;
      for (int p = 0; p < spec.phases; ++p) {
        row.push_back(rng.uniform(1.0 - spec.noise_sigma, 1.0 + spec.noise_sigma));
      }
      t.per_iteration_noise.push_back(std::move(row));
    }
  }

  t.validate();
  return t;
}

}  // namespace hmplace
