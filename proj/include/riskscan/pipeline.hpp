#pragma once

#include <string>
#include <vector>

#include "riskscan/cases.hpp"
#include "riskscan/config.hpp"
#include "riskscan/forecaster.hpp"
#include "riskscan/region.hpp"
#include "riskscan/risk_surface.hpp"
#include "riskscan/scan.hpp"
#include "riskscan/validation.hpp"

namespace riskscan {

struct StudyData {
    StudyRegion region;
    std::vector<IntervalCounts> counts;
};

/// Loads population and cases and slices them into the configured intervals.
StudyData load_study(const RunConfig& config);

/// Scans every interval. Writes nothing.
std::vector<ScanResult> run_scans(const RunConfig& config, const StudyData& study);

/// Writes scan_<k>.json and clusters_<k>.csv per interval plus
/// effective_config.toml into config.output_dir.
std::vector<ScanResult> cmd_scan(const RunConfig& config);

struct ForecastRun {
    std::vector<RiskGrid> grids;  // one per interval, last one held out
    ForecastResult forecast;
    ValidationReport report;
};

/// Predicts the last configured interval from the earlier ones. Reuses scan
/// outputs in output_dir when they match the configuration, otherwise scans
/// and writes them first. Needs at least four intervals.
ForecastRun cmd_forecast(const RunConfig& config);

/// Cluster and transition tables plus one choropleth per interval, built
/// from existing scan outputs.
void cmd_report(const RunConfig& config);

/// Checks configuration and inputs without scanning; returns a summary.
std::string cmd_validate(const RunConfig& config);

}  // namespace riskscan
