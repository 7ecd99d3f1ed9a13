#include "sentinel/simulate.hpp"

#include <cmath>

#include "sentinel/errors.hpp"

namespace sentinel {

namespace {
constexpr std::uint64_t kDatasetStreamKey = 0xD5;
}

void ScenarioConfig::validate() const {
  if (!(p_true >= 0.0) || !(p_true < 1.0)) {
    throw InputError("scenario: p_true must lie in [0, 1)");
  }
  if (!(d > 0.0) || !(d < 1.0)) throw InputError("scenario: d_radius must lie in (0, 1)");
  if (n < 1) throw InputError("scenario: n_events must be >= 1");
  if (p_true > 0.0 && location.l1 * location.l1 + location.l2 * location.l2 > 1.0) {
    throw InputError("scenario: source location outside the unit disk");
  }
}

Observation sample_background(SplitMix64& rng) {
  const double theta = rng.uniform(0.0, kTwoPi);
  const double s = rng.uniform(-1.0, 1.0);
  return {theta, s};
}

Observation sample_source_event(SplitMix64& rng, Location location, double d,
                                std::int64_t* rejections) {
  const double theta = rng.uniform(0.0, kTwoPi);
  const double base = location.l1 * std::cos(theta) + location.l2 * std::sin(theta);
  for (;;) {
    const double s = base + rng.uniform(-d, d);
    if (s >= -1.0 && s <= 1.0) return {theta, s};
    if (rejections != nullptr) ++*rejections;
  }
}

DatasetResult generate_dataset(const ScenarioConfig& config) {
  config.validate();
  SplitMix64 rng(substream(config.seed, kDatasetStreamKey));
  DatasetResult result;
  result.observations.reserve(static_cast<std::size_t>(config.n));
  result.events.reserve(static_cast<std::size_t>(config.n));
  for (std::int64_t i = 0; i < config.n; ++i) {
    const bool from_source = rng.next_double() < config.p_true;
    Observation obs;
    if (from_source) {
      obs = sample_source_event(rng, config.location, config.d, &result.s_rejections);
      ++result.source_events;
    } else {
      obs = sample_background(rng);
    }
    result.observations.push_back_canonical(obs.theta, obs.s);
    result.events.push_back({static_cast<std::uint8_t>(from_source ? 1 : 0), obs});
  }
  return result;
}

}  // namespace sentinel
