#include "sentinel/types.hpp"

#include <cmath>
#include <string>

#include "sentinel/errors.hpp"

namespace sentinel {

ObservationSet ObservationSet::from_records(std::span<const Observation> records) {
  ObservationSet out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Observation& rec = records[i];
    if (!std::isfinite(rec.theta) || !std::isfinite(rec.s)) {
      throw InputError("observation " + std::to_string(i) + ": non-finite field");
    }
    if (rec.s < -1.0 || rec.s > 1.0) {
      throw InputError("observation " + std::to_string(i) + ": |s| > 1 (s=" +
                       std::to_string(rec.s) + ")");
    }
    out.push_back_canonical(wrap_angle(rec.theta), rec.s);
  }
  return out;
}

void ObservationSet::reserve(std::size_t n) {
  theta_.reserve(n);
  s_.reserve(n);
  cos_theta_.reserve(n);
  sin_theta_.reserve(n);
}

void ObservationSet::push_back_canonical(double theta, double s) {
  theta_.push_back(theta);
  s_.push_back(s);
  cos_theta_.push_back(std::cos(theta));
  sin_theta_.push_back(std::sin(theta));
}

PriorSpec PriorSpec::equally_spaced(double a_p, double b_p, int h) {
  if (!(a_p > 0.0) || !(b_p < 1.0) || !(a_p <= b_p)) {
    throw InputError("prior grid bounds must satisfy 0 < a_p <= b_p < 1");
  }
  if (h < 1 || (h == 1 && a_p != b_p)) {
    throw InputError("prior grid needs h >= 1 (and a_p == b_p when h == 1)");
  }
  PriorSpec spec;
  spec.grid.resize(static_cast<std::size_t>(h));
  if (h == 1) {
    spec.grid[0] = a_p;
    return spec;
  }
  for (int j = 0; j < h; ++j) {
    spec.grid[static_cast<std::size_t>(j)] =
        a_p + (b_p - a_p) * static_cast<double>(j) / static_cast<double>(h - 1);
  }
  spec.grid.back() = b_p;  // guard against rounding at the top endpoint
  return spec;
}

}  // namespace sentinel
