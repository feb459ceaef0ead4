#pragma once

#include <optional>
#include <string>

#include "riskscan/forecaster.hpp"
#include "riskscan/region.hpp"
#include "riskscan/risk_surface.hpp"

namespace riskscan {

/// Choropleth of a risk grid. Colours run linearly blue (RR 0) -> white
/// (RR 1) -> red (RR 3); values are clipped to [0, 3] for display only.
/// Location centroids are drawn as dots when a region is given.
std::string risk_grid_svg(const RiskGrid& grid, const StudyRegion* region, const std::string& title);

/// Predicted vs observed cell values with the identity line and R^2 label.
std::string scatter_svg(const Grid& predicted, const Grid& observed, std::optional<double> r_squared,
                        const std::string& title);

}  // namespace riskscan
