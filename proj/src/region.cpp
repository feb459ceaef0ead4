#include "riskscan/region.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "csv_reader.hpp"
#include "riskscan/error.hpp"

namespace riskscan {

namespace {

std::optional<std::string> location_problem(const Location& loc) {
    if (!(loc.position.lat >= -90.0 && loc.position.lat <= 90.0)) {
        return fmt::format("latitude {} out of range [-90, 90]", loc.position.lat);
    }
    if (!(loc.position.lon >= -180.0 && loc.position.lon <= 180.0)) {
        return fmt::format("longitude {} out of range [-180, 180]", loc.position.lon);
    }
    if (loc.population < 0) {
        return fmt::format("negative population {}", loc.population);
    }
    if (!(loc.land_area_km2 >= 0.0) || !std::isfinite(loc.land_area_km2)) {
        return fmt::format("invalid land area {}", loc.land_area_km2);
    }
    return std::nullopt;
}

double to_double(const detail::CsvReader& reader, const std::string& field, const char* what) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        reader.fail(fmt::format("cannot parse {} '{}'", what, field));
    }
    return value;
}

std::int64_t to_int(const detail::CsvReader& reader, const std::string& field, const char* what) {
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) {
        reader.fail(fmt::format("cannot parse {} '{}'", what, field));
    }
    return value;
}

}  // namespace

StudyRegion::StudyRegion(std::vector<Location> locations) : locations_(std::move(locations)) {
    if (locations_.size() < 2) {
        throw InputError(fmt::format("study region needs at least 2 locations, got {}", locations_.size()));
    }
    index_.reserve(locations_.size());
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        const Location& loc = locations_[i];
        if (auto problem = location_problem(loc)) {
            throw InputError(fmt::format("location '{}': {}", loc.id, *problem));
        }
        if (!index_.emplace(loc.id, i).second) {
            throw InputError(fmt::format("duplicate location id '{}'", loc.id));
        }
        total_population_ += loc.population;
    }
}

std::optional<std::size_t> StudyRegion::index_of(const std::string& id) const {
    if (auto it = index_.find(id); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

StudyRegion load_population(const std::string& path) {
    detail::CsvReader reader(path);
    reader.expect_header("id,name,lat,lon,population,land_area_km2");

    std::vector<Location> locations;
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 6) {
            reader.fail(fmt::format("expected 6 fields, got {}", fields.size()));
        }
        Location loc;
        loc.id = fields[0];
        loc.name = fields[1];
        if (loc.id.empty()) {
            reader.fail("empty id");
        }
        loc.position.lat = to_double(reader, fields[2], "lat");
        loc.position.lon = to_double(reader, fields[3], "lon");
        loc.population = to_int(reader, fields[4], "population");
        loc.land_area_km2 = to_double(reader, fields[5], "land_area_km2");
        if (auto problem = location_problem(loc)) {
            reader.fail(*problem);
        }
        if (auto [it, inserted] = seen.emplace(loc.id, reader.line()); !inserted) {
            reader.fail(fmt::format("duplicate id '{}' (first seen on row {})", loc.id, it->second));
        }
        locations.push_back(std::move(loc));
    }
    return StudyRegion(std::move(locations));
}

}  // namespace riskscan
