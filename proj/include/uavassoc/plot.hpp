#pragma once

#include <span>
#include <string>

#include "uavassoc/harness.hpp"

namespace uavassoc::plot {

/// SVG line chart of coverage against the sweep axis, one line per policy.
std::string coverage_svg(std::span<const harness::CoverageResult> rows, const std::string& x_label);

}  // namespace uavassoc::plot
