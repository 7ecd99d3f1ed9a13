#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace sentinel {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Reduce an angle to the canonical range [0, 2*pi).
inline double wrap_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

/// One detected trajectory in normal coordinates: the angle of its normal
/// and its signed distance from the origin, in unit-disk radii.
struct Observation {
  double theta = 0.0;  // [0, 2*pi)
  double s = 0.0;      // [-1, 1]
};

/// Cartesian point in the unit disk.
struct Location {
  double l1 = 0.0;
  double l2 = 0.0;
};

struct PolarPoint {
  double r = 0.0;
  double u = 0.0;  // [0, 2*pi)
};

/// Candidate source description under the source-present model.
struct ParameterState {
  double p = 0.0;  // emission fraction, element of the active prior grid
  double r = 0.0;  // radial coordinate in [0, 1]
  double u = 0.0;  // angular coordinate in [0, 2*pi)
};

/// Radius of the suspected source, in unit-disk radii. Must lie in (0, 1).
struct SourceGeometry {
  double d = 0.01;
};

/// Cold-chain posterior draws with their cached hit counts; the input to
/// every inference operation.
struct PosteriorSamples {
  std::vector<ParameterState> states;
  std::vector<std::int64_t> j_values;  // j_values[k] = hit count at states[k]
  std::int64_t n = 0;                  // dataset size
  double d = 0.0;                      // source radius

  std::size_t size() const { return states.size(); }
};

/// Immutable set of detected trajectories. Stored column-wise with
/// precomputed cos/sin of each angle; the hit-count kernel is evaluated at
/// every MCMC proposal and the trigonometry would otherwise dominate.
class ObservationSet {
 public:
  ObservationSet() = default;

  /// Validating ingestion: angles are reduced mod 2*pi, records with
  /// non-finite fields or |s| > 1 are rejected (such trajectories are never
  /// detected in the first place). Throws InputError naming the offending
  /// zero-based record index.
  static ObservationSet from_records(std::span<const Observation> records);

  void reserve(std::size_t n);

  /// Appends a record that is already canonical (theta in [0, 2*pi),
  /// |s| <= 1). Used by the simulator, which constructs such records.
  void push_back_canonical(double theta, double s);

  std::size_t size() const { return theta_.size(); }
  bool empty() const { return theta_.empty(); }

  Observation operator[](std::size_t i) const { return {theta_[i], s_[i]}; }

  std::span<const double> theta() const { return theta_; }
  std::span<const double> s() const { return s_; }
  std::span<const double> cos_theta() const { return cos_theta_; }
  std::span<const double> sin_theta() const { return sin_theta_; }

 private:
  std::vector<double> theta_;
  std::vector<double> s_;
  std::vector<double> cos_theta_;
  std::vector<double> sin_theta_;
};

/// Discrete prior grid for the emission fraction: h values equally spaced
/// on [a_p, b_p] with 0 < a_p and b_p < 1.
struct PriorSpec {
  std::vector<double> grid;

  static PriorSpec equally_spaced(double a_p, double b_p, int h);

  std::size_t size() const { return grid.size(); }
  double a_p() const { return grid.front(); }
  double b_p() const { return grid.back(); }
};

}  // namespace sentinel
