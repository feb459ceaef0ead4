#pragma once

#include <cstddef>
#include <vector>

#include "riskscan/region.hpp"

namespace riskscan {

/// Mean Earth radius (IUGG), km. Spherical model throughout.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance in km.
double haversine_km(LatLon a, LatLon b);

/// For each center, every location index sorted by ascending distance from
/// it. The center itself always comes first; remaining ties are broken by
/// ascending id.
using NeighborOrder = std::vector<std::vector<std::size_t>>;

NeighborOrder neighbor_order(const StudyRegion& region, unsigned workers = 1);

}  // namespace riskscan
