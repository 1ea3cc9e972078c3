#pragma once

#include <optional>
#include <ostream>

#include "formation/control.hpp"
#include "formation/geometry.hpp"
#include "formation/partition.hpp"

namespace formation::plot {

/// Writes a static SVG snapshot of a framework: agents as labeled circles and
/// edges colored by the sign of d - target (red long, blue short, green at
/// target). When a partition is supplied, edges are colored by part hue
/// instead. The first line after the XML declaration is a version comment;
/// everything else is deterministic for identical inputs.
void write_svg(std::ostream& out, const FormationSystem& sys,
               const Configuration& p,
               const std::optional<IndependentPartition>& partition = std::nullopt);

}  // namespace formation::plot
