#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskscan/date.hpp"
#include "riskscan/risk_surface.hpp"

namespace riskscan {

/// Interval boundaries used when a config names none: seven abutting
/// intervals from 2020-05-24 to 2023-03-12.
std::vector<Date> default_boundaries();

struct RunConfig {
    std::string population_path;
    std::string cases_path;
    std::vector<Date> boundaries = default_boundaries();
    double max_fraction = 0.25;
    int replications = 999;
    double significance = 0.05;
    GridSpec grid;
    double grid_step = 0.01;
    std::uint64_t seed = 12345;
    std::string output_dir = "out";
    /// Worker threads (0 = hardware concurrency). Never changes outputs.
    unsigned workers = 0;

    /// Throws InputError on out-of-range values.
    void validate() const;
};

/// Reads a `key = value` file (`#` starts a comment). Relative input paths
/// are resolved against the file's directory. Unknown keys are rejected.
RunConfig load_config(const std::string& path);

/// Applies `key = value` text on top of `base`; `base_dir` resolves
/// relative paths.
RunConfig parse_config(const std::string& text, RunConfig base, const std::string& base_dir);

/// Settings that determine outputs, in load_config syntax. Worker count and
/// output directory are omitted because they never change output contents.
std::string serialize_config(const RunConfig& config);

}  // namespace riskscan
