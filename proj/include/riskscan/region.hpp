#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace riskscan {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

/// A geographic unit: point centroid plus population and land area.
struct Location {
    std::string id;
    std::string name;
    LatLon position;
    std::int64_t population = 0;
    double land_area_km2 = 0.0;
};

/// Ordered, validated set of locations. Immutable after construction.
///
/// Construction enforces: at least two locations, unique ids, coordinates
/// inside [-90, 90] x [-180, 180], nonnegative population and land area.
class StudyRegion {
public:
    explicit StudyRegion(std::vector<Location> locations);

    std::size_t size() const { return locations_.size(); }
    const Location& operator[](std::size_t i) const { return locations_[i]; }
    const std::vector<Location>& locations() const { return locations_; }
    std::int64_t total_population() const { return total_population_; }

    std::optional<std::size_t> index_of(const std::string& id) const;

private:
    std::vector<Location> locations_;
    std::unordered_map<std::string, std::size_t> index_;
    std::int64_t total_population_ = 0;
};

/// Reads `id,name,lat,lon,population,land_area_km2`. Row order is kept.
StudyRegion load_population(const std::string& path);

}  // namespace riskscan
