#pragma once

#include <filesystem>
#include <optional>

#include "sentinel/inference.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

// Plot rendering. The CSV artifacts are normative; these figures exist for
// eyeballing runs, so they are plain hand-rolled SVG with no dependencies.

/// Grey-scale heat map of a conditional density surface over the unit disk,
/// brightest cell = highest log density, with an optional truth crosshair.
void write_density_svg(const std::filesystem::path& path, const DensitySurface& surf,
                       std::optional<Location> truth);

/// Posterior location cloud: one translucent dot per retained draw, HPD
/// cells shaded underneath, optional truth crosshair.
void write_scatter_svg(const std::filesystem::path& path,
                       const PosteriorSamples& samples, const HpdRegion& hpd,
                       std::optional<Location> truth);

}  // namespace sentinel
