#include "riskscan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "riskscan/parallel.hpp"

namespace riskscan {

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

double haversine_km(LatLon a, LatLon b) {
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    const double dphi = phi2 - phi1;
    const double dlambda = deg2rad(b.lon - a.lon);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

NeighborOrder neighbor_order(const StudyRegion& region, unsigned workers) {
    const std::size_t n = region.size();
    NeighborOrder order(n);
    parallel_for(n, workers, [&](std::size_t center) {
        std::vector<double> dist(n);
        for (std::size_t j = 0; j < n; ++j) {
            dist[j] = j == center ? 0.0 : haversine_km(region[center].position, region[j].position);
        }
        auto& row = order[center];
        row.resize(n);
        std::iota(row.begin(), row.end(), std::size_t{0});
        std::sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) {
            if ((a == center) != (b == center)) {
                return a == center;
            }
            if (dist[a] != dist[b]) {
                return dist[a] < dist[b];
            }
            return region[a].id < region[b].id;
        });
    });
    return order;
}

}  // namespace riskscan
