// End-to-end behaviors of the map and HPD surfaces on simulated data.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "sentinel/geometry.hpp"
#include "sentinel/inference.hpp"
#include "sentinel/sampler.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/types.hpp"

using namespace sentinel;

namespace {

DatasetResult make_dataset(double p_true, Location loc, std::int64_t n,
                           std::uint64_t seed) {
  ScenarioConfig sc;
  sc.p_true = p_true;
  sc.location = loc;
  sc.d = 0.01;
  sc.n = n;
  sc.seed = seed;
  return generate_dataset(sc);
}

// Rebuilds the dense lattice from the in-disk center list, missing cells at
// -inf.
std::vector<double> dense_grid(const DensitySurface& surf) {
  const int res = surf.resolution;
  std::vector<double> grid(static_cast<std::size_t>(res) * res,
                           -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < surf.log_density.size(); ++k) {
    const int ix = static_cast<int>((surf.l1[k] + 1.0) * 0.5 * res);
    const int iy = static_cast<int>((surf.l2[k] + 1.0) * 0.5 * res);
    grid[static_cast<std::size_t>(iy) * res + ix] = surf.log_density[k];
  }
  return grid;
}

}  // namespace

TEST_CASE("conditional map peaks in the cell holding a strong source") {
  const Location truth{0.6, 0.3};
  const DatasetResult data = make_dataset(0.01, truth, 20000, 311);
  const DensitySurface surf = conditional_location_map(data.observations, 0.01, 0.01, 64);
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(surf.log_density.begin(),
                                                surf.log_density.end()) -
                               surf.log_density.begin());
  // The argmax cell is the one containing the true center.
  const double half = 1.0 / 64.0;
  CHECK(std::abs(surf.l1[best] - truth.l1) <= half);
  CHECK(std::abs(surf.l2[best] - truth.l2) <= half);
}

TEST_CASE("conditional map on background-only data is multimodal") {
  const DatasetResult data = make_dataset(0.0, {0.0, 0.0}, 20000, 97);
  const DensitySurface surf =
      conditional_location_map(data.observations, 0.001, 0.01, 64);
  const std::vector<double> grid = dense_grid(surf);
  const int res = surf.resolution;
  int modes = 0;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      const double v = grid[static_cast<std::size_t>(iy) * res + ix];
      if (!std::isfinite(v)) continue;
      bool peak = true;
      for (int dy = -1; dy <= 1 && peak; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = ix + dx;
          const int ny = iy + dy;
          if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
          if (grid[static_cast<std::size_t>(ny) * res + nx] >= v) {
            peak = false;
            break;
          }
        }
      modes += peak ? 1 : 0;
    }
  CHECK(modes > 5);
}

TEST_CASE("conditional map of no data reduces to the radial prior") {
  const ObservationSet empty;
  const DensitySurface surf = conditional_location_map(empty, 0.001, 0.01, 32);
  for (std::size_t k = 0; k < surf.log_density.size(); ++k)
    CHECK(surf.log_density[k] ==
          doctest::Approx(std::log(std::hypot(surf.l1[k], surf.l2[k])))
              .epsilon(1e-12));
}

TEST_CASE("background-only run yields a diffuse HPD region") {
  const DatasetResult data = make_dataset(0.0, {0.0, 0.0}, 2000, 1234);
  SamplerConfig config;
  config.iterations = 50000;
  config.thinning = 5;
  config.ladder = TemperatureLadder::geometric(4);
  config.seed = 88;
  const SamplerResult run =
      run_sampler(data.observations, PriorSpec::equally_spaced(0.0002, 0.002, 10),
                  0.01, config);
  const HpdRegion hpd = hpd_region_2d(run.samples, 0.95, 64);
  const double cell_area = (2.0 / 64.0) * (2.0 / 64.0);
  const double disk_area = std::acos(-1.0);
  CHECK(static_cast<double>(hpd.cells.size()) * cell_area > 0.5 * disk_area);
}

TEST_CASE("detected-source run concentrates its HPD region near the truth") {
  const Location truth{0.6, 0.3};
  const DatasetResult data = make_dataset(0.01, truth, 10000, 555);
  SamplerConfig config;
  config.iterations = 15000;
  config.ladder = TemperatureLadder::geometric(4);
  config.seed = 99;
  const SamplerResult run = run_sampler(
      data.observations, PriorSpec::equally_spaced(0.002, 0.02, 10), 0.01, config);
  const HpdRegion hpd = hpd_region_2d(run.samples, 0.95, 64);
  REQUIRE(!hpd.cells.empty());
  // Every HPD cell center lies in the 0.1 x 0.1 box around the source.
  const double step = 2.0 / 64.0;
  for (const HpdCell& cell : hpd.cells) {
    const double cx = -1.0 + (cell.ix + 0.5) * step;
    const double cy = -1.0 + (cell.iy + 0.5) * step;
    CHECK(std::abs(cx - truth.l1) <= 0.05);
    CHECK(std::abs(cy - truth.l2) <= 0.05);
  }
  CHECK(hpd_contains(hpd, truth.l1, truth.l2));
}
