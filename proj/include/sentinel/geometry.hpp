#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "sentinel/types.hpp"

namespace sentinel {

/// True iff a trajectory with normal coordinates (theta, s) passes within
/// distance d of the point (l1, l2). The boundary is closed: ties count as
/// hits. Total function of its inputs.
inline bool ballistic_indicator(double theta, double s, double l1, double l2, double d) {
  return std::abs(l1 * std::cos(theta) + l2 * std::sin(theta) - s) <= d;
}

inline Location polar_to_cartesian(double r, double u) {
  return {r * std::cos(u), r * std::sin(u)};
}

/// Inverse of polar_to_cartesian with u in [0, 2*pi). The origin maps to
/// (r=0, u=0) by convention.
inline PolarPoint cartesian_to_polar(double l1, double l2) {
  const double r = std::hypot(l1, l2);
  if (r == 0.0) return {0.0, 0.0};
  return {r, wrap_angle(std::atan2(l2, l1))};
}

/// Number of trajectories passing within d of the point (l1, l2). Uses the
/// precomputed cos/sin columns of the observation set; exactly equal to
/// summing ballistic_indicator record by record.
std::int64_t hit_count_at(const ObservationSet& obs, double l1, double l2, double d);

inline std::int64_t hit_count(const ObservationSet& obs, double r, double u, double d) {
  const Location loc = polar_to_cartesian(r, u);
  return hit_count_at(obs, loc.l1, loc.l2, d);
}

/// Evaluates hit counts for several candidate points in one blocked pass
/// over the observation columns. out[k] receives the count for points[k].
/// Equivalent to calling hit_count_at per point; the blocking only buys
/// cache reuse when many chains propose in lockstep.
void hit_count_multi(const ObservationSet& obs, std::span<const Location> points,
                     double d, std::span<std::int64_t> out);

}  // namespace sentinel
