#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "riskscan/region.hpp"
#include "riskscan/scan.hpp"

namespace riskscan {

/// Regular lat/lon raster. Row 0 is the northernmost band, column 0 the
/// westernmost.
struct GridSpec {
    int rows = 40;
    int cols = 80;
    double lat_min = 24.0;
    double lat_max = 50.0;
    double lon_min = -125.0;
    double lon_max = -66.0;

    /// Throws InputError unless rows, cols >= 2 and the box is non-degenerate
    /// and inside the coordinate ranges.
    void validate() const;

    double cell_height_deg() const { return (lat_max - lat_min) / rows; }
    double cell_width_deg() const { return (lon_max - lon_min) / cols; }
    LatLon cell_centroid(int row, int col) const;

    bool operator==(const GridSpec&) const = default;
};

/// Relative risk per cell; 1.0 outside every significant cluster.
struct RiskGrid {
    GridSpec spec;
    Eigen::MatrixXd values;
    int interval_index = 0;
};

/// Spherical-rectangle area of one cell, km^2.
double cell_area_km2(const GridSpec& spec, int row, int col);
double total_area_km2(const GridSpec& spec);

/// Per-cell coverage by cluster circles, before any precedence is applied.
struct Coverage {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> high;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> low;
};

/// A cell is covered by a cluster when the haversine distance from the
/// cluster center to the cell centroid is at most the cluster's extent_km.
Coverage cluster_coverage(const ScanResult& scan, const StudyRegion& region, const GridSpec& spec,
                          unsigned workers = 1);

/// Each cell takes the relative risk of the covering cluster with the largest
/// LLR (ties: high before low, then lower center index); uncovered cells 1.0.
/// The result does not depend on cluster list order.
RiskGrid rasterize(const ScanResult& scan, const StudyRegion& region, const GridSpec& spec, unsigned workers = 1);

struct DescriptiveStats {
    int interval_index = 0;
    std::size_t high_clusters = 0;
    std::size_t low_clusters = 0;
    double high_area_km2 = 0.0;      // cells with RR > 1
    double low_area_km2 = 0.0;       // cells with RR < 1
    double overlap_area_km2 = 0.0;   // cells covered by both a high and a low circle
    double cluster_area_km2 = 0.0;   // cells covered by any circle
    double grid_area_km2 = 0.0;
    double high_pct = 0.0;
    double low_pct = 0.0;
    double overlap_pct = 0.0;
    double cluster_pct = 0.0;
};

DescriptiveStats descriptive_stats(const ScanResult& scan, const RiskGrid& grid, const StudyRegion& region,
                                   unsigned workers = 1);

struct TransitionEntry {
    double area_km2 = 0.0;
    /// Share of the source interval's class area (H for HH and HL, L for LL and LH).
    double pct_of_source = 0.0;
    /// Share of the destination interval's class area.
    double pct_of_destination = 0.0;
};

struct TransitionStats {
    int from_interval = 0;
    int to_interval = 0;
    TransitionEntry high_high;
    TransitionEntry low_low;
    TransitionEntry high_low;
    TransitionEntry low_high;
};

/// Cells are H when RR > 1 and L when RR < 1. Percentages whose reference
/// area is zero are reported as 0. Throws InputError on GridSpec mismatch.
TransitionStats transition_stats(const RiskGrid& from, const RiskGrid& to);

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// Headerless CSV, one line per row.
std::string grid_to_csv(const Eigen::MatrixXd& values);
Eigen::MatrixXd grid_from_csv(const std::string& text, int rows, int cols);

nlohmann::json descriptive_stats_to_json(const DescriptiveStats& s);
nlohmann::json transition_stats_to_json(const TransitionStats& t);

}  // namespace riskscan
