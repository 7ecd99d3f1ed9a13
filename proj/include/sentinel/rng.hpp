#pragma once

#include <cmath>
#include <cstdint>

namespace sentinel {

// All randomness in this project flows through SplitMix64 streams.
// Stream identity (for cross-language replay):
//   state' = state + 0x9E3779B97F4A7C15
//   output = mix64(state'), with mix64 the SplitMix64 finalizer
//     z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//     z ^= z >> 27; z *= 0x94D049BB133111EB;
//     z ^= z >> 31;
// Unit doubles take the top 53 bits: (output >> 11) * 2^-53, giving [0, 1).
// Substreams are derived, not split off a running stream:
//   substream(seed, key) = mix64(seed + 0x9E3779B97F4A7C15 * (key + 1)).

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t key) {
  return mix64(seed + kGoldenGamma * (key + 1));
}

class SplitMix64 {
 public:
  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe to pass to log().
  double next_double_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller; consumes exactly two outputs per call.
  double normal() {
    const double u1 = next_double_open_low();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Rejection-sampled N(mean, sd) restricted to [lo, hi]. Caller guarantees
  /// the interval has non-trivial mass under the proposal (here mean always
  /// lies inside [lo, hi], so acceptance is at least ~1/2).
  double truncated_normal(double mean, double sd, double lo, double hi) {
    for (;;) {
      const double x = normal(mean, sd);
      if (x >= lo && x <= hi) return x;
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace sentinel
