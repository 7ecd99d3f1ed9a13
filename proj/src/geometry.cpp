#include "sentinel/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace sentinel {

namespace {
constexpr std::size_t kBlock = 2048;  // 3 columns * 8 B * 2048 = 48 KiB, L1/L2 resident
}

std::int64_t hit_count_at(const ObservationSet& obs, double l1, double l2, double d) {
  const double* ct = obs.cos_theta().data();
  const double* st = obs.sin_theta().data();
  const double* s = obs.s().data();
  const std::size_t n = obs.size();
  std::int64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += std::abs(l1 * ct[i] + l2 * st[i] - s[i]) <= d;
  }
  return count;
}

void hit_count_multi(const ObservationSet& obs, std::span<const Location> points,
                     double d, std::span<std::int64_t> out) {
  assert(points.size() == out.size());
  const double* ct = obs.cos_theta().data();
  const double* st = obs.sin_theta().data();
  const double* s = obs.s().data();
  const std::size_t n = obs.size();
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t base = 0; base < n; base += kBlock) {
    const std::size_t end = std::min(n, base + kBlock);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double l1 = points[k].l1;
      const double l2 = points[k].l2;
      std::int64_t count = 0;
      for (std::size_t i = base; i < end; ++i) {
        count += std::abs(l1 * ct[i] + l2 * st[i] - s[i]) <= d;
      }
      out[k] += count;
    }
  }
}

}  // namespace sentinel
