#include "sentinel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <string>

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"

namespace sentinel {

namespace {

constexpr double kCanvas = 560.0;
constexpr double kMargin = 20.0;
constexpr double kPlot = kCanvas - 2.0 * kMargin;

// Unit-disk coordinates to pixel coordinates (l2 up, SVG y down).
double px(double l1) { return kMargin + (l1 + 1.0) * 0.5 * kPlot; }
double py(double l2) { return kMargin + (1.0 - l2) * 0.5 * kPlot; }

void append(std::string& svg, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  svg += buf;
}

std::string header() {
  std::string svg;
  append(svg,
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
         "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
         kCanvas, kCanvas, kCanvas, kCanvas);
  append(svg, "<rect width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", kCanvas,
         kCanvas);
  return svg;
}

void add_disk_outline(std::string& svg) {
  append(svg,
         "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"none\" "
         "stroke=\"black\" stroke-width=\"1.5\"/>\n",
         px(0.0), py(0.0), kPlot * 0.5);
}

void add_truth_cross(std::string& svg, const Location& truth) {
  const double x = px(truth.l1);
  const double y = py(truth.l2);
  append(svg,
         "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
         "stroke=\"red\" stroke-width=\"2\"/>\n",
         x - 8.0, y, x + 8.0, y, x, y - 8.0, x, y + 8.0);
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << svg;
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace

void write_density_svg(const std::filesystem::path& path, const DensitySurface& surf,
                       std::optional<Location> truth) {
  std::string svg = header();
  if (!surf.log_density.empty()) {
    const auto [lo_it, hi_it] =
        std::minmax_element(surf.log_density.begin(), surf.log_density.end());
    const double lo = *lo_it;
    const double span = std::max(*hi_it - lo, 1e-300);
    const double cell = kPlot / surf.resolution;
    for (std::size_t i = 0; i < surf.log_density.size(); ++i) {
      const double t = (surf.log_density[i] - lo) / span;
      const int shade = static_cast<int>(std::lround(255.0 * t));
      append(svg,
             "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
             "fill=\"rgb(%d,%d,%d)\"/>\n",
             px(surf.l1[i]) - cell * 0.5, py(surf.l2[i]) - cell * 0.5, cell, cell,
             shade, shade, shade);
    }
  }
  add_disk_outline(svg);
  if (truth) add_truth_cross(svg, *truth);
  svg += "</svg>\n";
  write_svg(path, svg);
}

void write_scatter_svg(const std::filesystem::path& path,
                       const PosteriorSamples& samples, const HpdRegion& hpd,
                       std::optional<Location> truth) {
  std::string svg = header();

  const double cell = kPlot / hpd.resolution;
  for (const HpdCell& c : hpd.cells) {
    // Cell (ix, iy) spans [-1 + ix * w, -1 + (ix + 1) * w) in l1, w = 2/res.
    const double l1 = -1.0 + (c.ix + 0.5) * 2.0 / hpd.resolution;
    const double l2 = -1.0 + (c.iy + 0.5) * 2.0 / hpd.resolution;
    append(svg,
           "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
           "fill=\"rgb(190,210,255)\"/>\n",
           px(l1) - cell * 0.5, py(l2) - cell * 0.5, cell, cell);
  }

  for (const ParameterState& x : samples.states) {
    const Location loc = polar_to_cartesian(x.r, x.u);
    append(svg,
           "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\" fill=\"black\" "
           "fill-opacity=\"0.25\"/>\n",
           px(loc.l1), py(loc.l2));
  }

  add_disk_outline(svg);
  if (truth) add_truth_cross(svg, *truth);
  svg += "</svg>\n";
  write_svg(path, svg);
}

}  // namespace sentinel
