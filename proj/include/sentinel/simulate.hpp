#pragma once

#include <cstdint>
#include <vector>

#include "sentinel/rng.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

/// Knobs for one synthetic dataset.
struct ScenarioConfig {
  double p_true = 0.0;       // emission fraction in [0, 1)
  Location location;         // ignored when p_true == 0
  double d = 0.01;           // source radius
  std::int64_t n = 0;        // number of detected particles
  std::uint64_t seed = 0;

  void validate() const;  // throws InputError
};

/// One generated particle with its latent origin indicator. The indicator
/// never leaves the simulator's sidecar outputs; inference only ever sees
/// the ObservationSet.
struct GeneratedEvent {
  std::uint8_t delta = 0;  // 1 = ballistic source particle
  Observation obs;
};

struct DatasetResult {
  ObservationSet observations;
  std::vector<GeneratedEvent> events;
  std::int64_t source_events = 0;
  std::int64_t s_rejections = 0;  // resampled boundary overshoots, diagnostic
};

/// Background draw: theta ~ Uniform[0, 2*pi), s ~ Uniform[-1, 1].
Observation sample_background(SplitMix64& rng);

/// Ballistic source draw: theta ~ Uniform[0, 2*pi),
/// s = l1 cos(theta) + l2 sin(theta) + Uniform(-d, d). When the source sits
/// near the disk boundary the sum can leave [-1, 1]; such particles are not
/// detected, so the Uniform(-d, d) increment is resampled until |s| <= 1.
/// rejections, if non-null, accumulates the number of resamples.
Observation sample_source_event(SplitMix64& rng, Location location, double d,
                                std::int64_t* rejections = nullptr);

/// Mixture dataset: each event is a source draw with probability p_true,
/// otherwise background, in generation order, all from one stream derived
/// from config.seed. Fully deterministic in the config.
DatasetResult generate_dataset(const ScenarioConfig& config);

}  // namespace sentinel
