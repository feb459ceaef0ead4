#include "riskscan/risk_surface.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "riskscan/error.hpp"
#include "riskscan/geo.hpp"
#include "riskscan/parallel.hpp"

namespace riskscan {

using nlohmann::json;

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct Circle {
    const Cluster* cluster;
    LatLon center;
};

std::vector<Circle> circles_of(const ScanResult& scan, const StudyRegion& region) {
    std::vector<Circle> out;
    for (const auto* list : {&scan.high_clusters, &scan.low_clusters}) {
        for (const Cluster& c : *list) {
            out.push_back({&c, region[c.window.center].position});
        }
    }
    return out;
}

bool covers(const Circle& circle, LatLon point) {
    return haversine_km(circle.center, point) <= circle.cluster->window.extent_km;
}

// Strict total order used for precedence: larger llr wins, then high over
// low, then the lower center index.
bool takes_precedence(const Cluster& a, const Cluster& b) {
    if (a.llr != b.llr) {
        return a.llr > b.llr;
    }
    if (a.direction != b.direction) {
        return a.direction == Direction::high;
    }
    return a.window.center < b.window.center;
}

double percent(double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; }

}  // namespace

void GridSpec::validate() const {
    if (rows < 2 || cols < 2) {
        throw InputError(fmt::format("grid must be at least 2x2, got {}x{}", rows, cols));
    }
    if (!(lat_min < lat_max) || lat_min < -90.0 || lat_max > 90.0) {
        throw InputError(fmt::format("invalid grid latitude range [{}, {}]", lat_min, lat_max));
    }
    if (!(lon_min < lon_max) || lon_min < -180.0 || lon_max > 180.0) {
        throw InputError(fmt::format("invalid grid longitude range [{}, {}]", lon_min, lon_max));
    }
}

LatLon GridSpec::cell_centroid(int row, int col) const {
    return {lat_max - (row + 0.5) * cell_height_deg(), lon_min + (col + 0.5) * cell_width_deg()};
}

double cell_area_km2(const GridSpec& spec, int row, int col) {
    if (row < 0 || row >= spec.rows || col < 0 || col >= spec.cols) {
        throw std::out_of_range(fmt::format("cell ({}, {}) outside {}x{} grid", row, col, spec.rows, spec.cols));
    }
    const double top = spec.lat_max - row * spec.cell_height_deg();
    const double bottom = spec.lat_max - (row + 1) * spec.cell_height_deg();
    return kEarthRadiusKm * kEarthRadiusKm * deg2rad(spec.cell_width_deg()) *
           (std::sin(deg2rad(top)) - std::sin(deg2rad(bottom)));
}

double total_area_km2(const GridSpec& spec) {
    return kEarthRadiusKm * kEarthRadiusKm * deg2rad(spec.lon_max - spec.lon_min) *
           (std::sin(deg2rad(spec.lat_max)) - std::sin(deg2rad(spec.lat_min)));
}

Coverage cluster_coverage(const ScanResult& scan, const StudyRegion& region, const GridSpec& spec,
                          unsigned workers) {
    spec.validate();
    const auto circles = circles_of(scan, region);
    Coverage cov;
    cov.high.setConstant(spec.rows, spec.cols, false);
    cov.low.setConstant(spec.rows, spec.cols, false);
    parallel_for(static_cast<std::size_t>(spec.rows), workers, [&](std::size_t r) {
        const int row = static_cast<int>(r);
        for (int col = 0; col < spec.cols; ++col) {
            const LatLon centroid = spec.cell_centroid(row, col);
            for (const Circle& circle : circles) {
                if (covers(circle, centroid)) {
                    (circle.cluster->direction == Direction::high ? cov.high : cov.low)(row, col) = true;
                }
            }
        }
    });
    return cov;
}

RiskGrid rasterize(const ScanResult& scan, const StudyRegion& region, const GridSpec& spec, unsigned workers) {
    spec.validate();
    const auto circles = circles_of(scan, region);
    RiskGrid grid{spec, Eigen::MatrixXd::Ones(spec.rows, spec.cols), scan.interval.index};
    parallel_for(static_cast<std::size_t>(spec.rows), workers, [&](std::size_t r) {
        const int row = static_cast<int>(r);
        for (int col = 0; col < spec.cols; ++col) {
            const LatLon centroid = spec.cell_centroid(row, col);
            const Cluster* winner = nullptr;
            for (const Circle& circle : circles) {
                if (covers(circle, centroid) && (winner == nullptr || takes_precedence(*circle.cluster, *winner))) {
                    winner = circle.cluster;
                }
            }
            if (winner != nullptr) {
                grid.values(row, col) = winner->relative_risk;
            }
        }
    });
    return grid;
}

DescriptiveStats descriptive_stats(const ScanResult& scan, const RiskGrid& grid, const StudyRegion& region,
                                   unsigned workers) {
    const GridSpec& spec = grid.spec;
    const Coverage cov = cluster_coverage(scan, region, spec, workers);
    DescriptiveStats s;
    s.interval_index = scan.interval.index;
    s.high_clusters = scan.high_clusters.size();
    s.low_clusters = scan.low_clusters.size();
    for (int row = 0; row < spec.rows; ++row) {
        for (int col = 0; col < spec.cols; ++col) {
            const double area = cell_area_km2(spec, row, col);
            const double v = grid.values(row, col);
            s.grid_area_km2 += area;
            if (v > 1.0) {
                s.high_area_km2 += area;
            } else if (v < 1.0) {
                s.low_area_km2 += area;
            }
            if (cov.high(row, col) && cov.low(row, col)) {
                s.overlap_area_km2 += area;
            }
            if (cov.high(row, col) || cov.low(row, col)) {
                s.cluster_area_km2 += area;
            }
        }
    }
    s.high_pct = percent(s.high_area_km2, s.grid_area_km2);
    s.low_pct = percent(s.low_area_km2, s.grid_area_km2);
    s.overlap_pct = percent(s.overlap_area_km2, s.grid_area_km2);
    s.cluster_pct = percent(s.cluster_area_km2, s.grid_area_km2);
    return s;
}

TransitionStats transition_stats(const RiskGrid& from, const RiskGrid& to) {
    if (!(from.spec == to.spec) || from.values.rows() != to.values.rows() || from.values.cols() != to.values.cols()) {
        throw InputError(fmt::format("transition_stats: grids for intervals {} and {} have different specs",
                                     from.interval_index, to.interval_index));
    }
    const GridSpec& spec = from.spec;
    double from_high = 0.0;
    double from_low = 0.0;
    double to_high = 0.0;
    double to_low = 0.0;
    TransitionStats t;
    t.from_interval = from.interval_index;
    t.to_interval = to.interval_index;
    for (int row = 0; row < spec.rows; ++row) {
        for (int col = 0; col < spec.cols; ++col) {
            const double area = cell_area_km2(spec, row, col);
            const double a = from.values(row, col);
            const double b = to.values(row, col);
            from_high += a > 1.0 ? area : 0.0;
            from_low += a < 1.0 ? area : 0.0;
            to_high += b > 1.0 ? area : 0.0;
            to_low += b < 1.0 ? area : 0.0;
            if (a > 1.0 && b > 1.0) {
                t.high_high.area_km2 += area;
            } else if (a < 1.0 && b < 1.0) {
                t.low_low.area_km2 += area;
            } else if (a > 1.0 && b < 1.0) {
                t.high_low.area_km2 += area;
            } else if (a < 1.0 && b > 1.0) {
                t.low_high.area_km2 += area;
            }
        }
    }
    auto finish = [](TransitionEntry& e, double source, double destination) {
        e.pct_of_source = percent(e.area_km2, source);
        e.pct_of_destination = percent(e.area_km2, destination);
    };
    finish(t.high_high, from_high, to_high);
    finish(t.low_low, from_low, to_low);
    finish(t.high_low, from_high, to_low);
    finish(t.low_high, from_low, to_high);
    return t;
}

json grid_spec_to_json(const GridSpec& spec) {
    return json{{"rows", spec.rows},       {"cols", spec.cols},       {"lat_min", spec.lat_min},
                {"lat_max", spec.lat_max}, {"lon_min", spec.lon_min}, {"lon_max", spec.lon_max}};
}

GridSpec grid_spec_from_json(const json& j) {
    GridSpec spec;
    try {
        spec.rows = j.at("rows").get<int>();
        spec.cols = j.at("cols").get<int>();
        spec.lat_min = j.at("lat_min").get<double>();
        spec.lat_max = j.at("lat_max").get<double>();
        spec.lon_min = j.at("lon_min").get<double>();
        spec.lon_max = j.at("lon_max").get<double>();
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed grid spec: {}", e.what()));
    }
    spec.validate();
    return spec;
}

std::string grid_to_csv(const Eigen::MatrixXd& values) {
    std::string out;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0) {
                out += ',';
            }
            out += fmt::format("{}", values(r, c));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd grid_from_csv(const std::string& text, int rows, int cols) {
    Eigen::MatrixXd values(rows, cols);
    std::istringstream in(text);
    std::string line;
    int r = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (r >= rows) {
            throw InputError(fmt::format("grid CSV has more than {} rows", rows));
        }
        int c = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            if (c >= cols) {
                throw InputError(fmt::format("grid CSV row {} has more than {} columns", r + 1, cols));
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + comma, v);
            if (ec != std::errc{} || ptr != line.data() + comma) {
                throw InputError(fmt::format("grid CSV row {}: cannot parse column {}", r + 1, c + 1));
            }
            values(r, c++) = v;
            pos = comma + 1;
        }
        if (c != cols) {
            throw InputError(fmt::format("grid CSV row {} has {} columns, expected {}", r + 1, c, cols));
        }
        ++r;
    }
    if (r != rows) {
        throw InputError(fmt::format("grid CSV has {} rows, expected {}", r, rows));
    }
    return values;
}

json descriptive_stats_to_json(const DescriptiveStats& s) {
    return json{{"interval", s.interval_index},
                {"high_clusters", s.high_clusters},
                {"low_clusters", s.low_clusters},
                {"high_area_km2", s.high_area_km2},
                {"high_pct", s.high_pct},
                {"low_area_km2", s.low_area_km2},
                {"low_pct", s.low_pct},
                {"overlap_area_km2", s.overlap_area_km2},
                {"overlap_pct", s.overlap_pct},
                {"cluster_area_km2", s.cluster_area_km2},
                {"cluster_pct", s.cluster_pct},
                {"grid_area_km2", s.grid_area_km2}};
}

json transition_stats_to_json(const TransitionStats& t) {
    auto entry = [](const TransitionEntry& e) {
        return json{{"area_km2", e.area_km2},
                    {"pct_of_source", e.pct_of_source},
                    {"pct_of_destination", e.pct_of_destination}};
    };
    return json{{"from_interval", t.from_interval}, {"to_interval", t.to_interval},
                {"high_high", entry(t.high_high)},  {"low_low", entry(t.low_low)},
                {"high_low", entry(t.high_low)},    {"low_high", entry(t.low_high)}};
}

}  // namespace riskscan
