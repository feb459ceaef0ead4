#include "riskscan/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "riskscan/error.hpp"
#include "riskscan/scan_io.hpp"
#include "riskscan/svg.hpp"

namespace riskscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError(fmt::format("cannot write '{}'", path.string()));
    }
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot read '{}'", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path prepare_output(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
    return dir;
}

template <typename F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", name, e.what()));
    }
}

fs::path scan_json_path(const fs::path& dir, int k) { return dir / fmt::format("scan_{}.json", k); }

void write_scans(const fs::path& dir, const RunConfig& config, const StudyData& study,
                 const std::vector<ScanResult>& scans) {
    write_file(dir / "effective_config.toml", serialize_config(config));
    for (const ScanResult& s : scans) {
        write_file(scan_json_path(dir, s.interval.index), scan_result_to_json(s, study.region).dump(2) + "\n");
        write_file(dir / fmt::format("clusters_{}.csv", s.interval.index), scan_result_to_csv(s, study.region));
    }
}

bool matches(const ScanResult& s, const RunConfig& config, const IntervalCounts& counts) {
    return s.interval.index == counts.interval.index && s.interval.start == counts.interval.start &&
           s.interval.end == counts.interval.end && s.total_observed == counts.total_observed &&
           s.seed == config.seed && s.replications == config.replications &&
           s.significance == config.significance && s.max_fraction == config.max_fraction;
}

// Existing scan outputs when every interval has one consistent with the
// configuration; empty otherwise.
std::vector<ScanResult> reuse_scans(const fs::path& dir, const RunConfig& config, const StudyData& study) {
    std::vector<ScanResult> out;
    for (const IntervalCounts& counts : study.counts) {
        const fs::path path = scan_json_path(dir, counts.interval.index);
        if (!fs::exists(path)) {
            return {};
        }
        try {
            ScanResult s = scan_result_from_json(json::parse(read_file(path)), study.region);
            if (!matches(s, config, counts)) {
                spdlog::info("{} does not match the configuration; rescanning", path.string());
                return {};
            }
            out.push_back(std::move(s));
        } catch (const std::exception& e) {
            spdlog::warn("ignoring unreadable {}: {}", path.string(), e.what());
            return {};
        }
    }
    return out;
}

std::vector<ScanResult> load_scans_for_report(const fs::path& dir, const StudyData& study) {
    std::vector<ScanResult> out;
    for (const IntervalCounts& counts : study.counts) {
        const fs::path path = scan_json_path(dir, counts.interval.index);
        if (!fs::exists(path)) {
            throw InputError(fmt::format("missing scan output '{}'; run the scan command first", path.string()));
        }
        json doc;
        try {
            doc = json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw InputError(fmt::format("'{}': {}", path.string(), e.what()));
        }
        out.push_back(scan_result_from_json(doc, study.region));
    }
    return out;
}

std::vector<RiskGrid> rasterize_all(const RunConfig& config, const StudyData& study,
                                    const std::vector<ScanResult>& scans) {
    std::vector<RiskGrid> grids;
    for (const ScanResult& s : scans) {
        grids.push_back(rasterize(s, study.region, config.grid, config.workers));
    }
    return grids;
}

}  // namespace

StudyData load_study(const RunConfig& config) {
    stage("config", [&] {
        config.validate();
        return 0;
    });
    StudyRegion region = stage("load population", [&] {
        if (config.population_path.empty()) {
            throw InputError("no population file configured");
        }
        return load_population(config.population_path);
    });
    auto series = stage("load cases", [&] {
        if (config.cases_path.empty()) {
            throw InputError("no cases file configured");
        }
        return load_cases(config.cases_path, region);
    });
    auto counts = stage("slice intervals", [&] {
        return slice_intervals(series, intervals_from_boundaries(config.boundaries), region);
    });
    return StudyData{std::move(region), std::move(counts)};
}

std::vector<ScanResult> run_scans(const RunConfig& config, const StudyData& study) {
    return stage("scan", [&] {
        const WindowSet windows(study.region, config.max_fraction, config.workers);
        spdlog::info("{} locations, {} candidate windows", study.region.size(), windows.size());
        ScanOptions options;
        options.replications = config.replications;
        options.seed = config.seed;
        options.significance = config.significance;
        options.workers = config.workers;
        std::vector<ScanResult> out;
        for (const IntervalCounts& counts : study.counts) {
            out.push_back(scan(counts, windows, options));
            spdlog::info("interval {}: N = {}, {} high / {} low clusters", counts.interval.index,
                         counts.total_observed, out.back().high_clusters.size(), out.back().low_clusters.size());
        }
        return out;
    });
}

std::vector<ScanResult> cmd_scan(const RunConfig& config) {
    const StudyData study = load_study(config);
    auto scans = run_scans(config, study);
    const fs::path dir = stage("write outputs", [&] { return prepare_output(config); });
    stage("write outputs", [&] {
        write_scans(dir, config, study, scans);
        return 0;
    });
    return scans;
}

ForecastRun cmd_forecast(const RunConfig& config) {
    stage("config", [&] {
        config.validate();
        if (config.boundaries.size() < 5) {
            throw InputError(fmt::format(
                "forecasting needs at least 4 intervals (k >= 3 fitted plus one held out), got {}",
                config.boundaries.size() - 1));
        }
        return 0;
    });
    const StudyData study = load_study(config);
    const fs::path dir = stage("write outputs", [&] { return prepare_output(config); });

    auto scans = reuse_scans(dir, config, study);
    if (scans.empty()) {
        scans = run_scans(config, study);
        stage("write outputs", [&] {
            write_scans(dir, config, study, scans);
            return 0;
        });
    }

    ForecastRun run;
    run.grids = stage("rasterize", [&] { return rasterize_all(config, study, scans); });
    const RiskGrid& held_out = run.grids.back();
    std::vector<RiskGrid> fitted(run.grids.begin(), run.grids.end() - 1);
    const RiskSequence seq = RiskSequence::from_risk_grids(fitted);

    run.forecast = stage("forecast", [&] { return predict_next(seq, config.grid_step, config.workers); });
    run.report = stage("validate", [&] { return compare_models(seq, held_out.values, config.grid_step, config.workers); });

    stage("write outputs", [&] {
        write_file(dir / "grid_spec.json", grid_spec_to_json(config.grid).dump(2) + "\n");
        for (const RiskGrid& g : run.grids) {
            write_file(dir / fmt::format("grid_{}.csv", g.interval_index), grid_to_csv(g.values));
        }
        json doc = forecast_to_json(run.forecast);
        doc["fitted_intervals"] = fitted.size();
        doc["predicted_interval"] = held_out.interval_index;
        write_file(dir / "forecast.json", doc.dump(2) + "\n");
        write_file(dir / "predicted_grid.csv", grid_to_csv(run.forecast.predicted));
        write_file(dir / "observed_grid.csv", grid_to_csv(held_out.values));
        write_file(dir / "validation.json", validation_to_json(run.report).dump(2) + "\n");
        write_file(dir / "validation.txt", validation_to_text(run.report));
        write_file(dir / "scatter.svg",
                   scatter_svg(run.forecast.predicted, held_out.values, run.report.models.front().metrics.r_squared,
                               fmt::format("Interval {}: predicted vs observed relative risk", held_out.interval_index)));
        return 0;
    });
    return run;
}

void cmd_report(const RunConfig& config) {
    const StudyData study = load_study(config);
    const fs::path dir(config.output_dir);
    const auto scans = stage("report", [&] { return load_scans_for_report(dir, study); });
    const auto grids = stage("rasterize", [&] { return rasterize_all(config, study, scans); });

    std::string clusters_csv =
        "interval,start,end,high_clusters,low_clusters,high_area_km2,high_pct,low_area_km2,low_pct,"
        "overlap_area_km2,overlap_pct,cluster_area_km2,cluster_pct\n";
    json descriptive = json::array();
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const DescriptiveStats s = descriptive_stats(scans[i], grids[i], study.region, config.workers);
        clusters_csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.interval_index,
                                    scans[i].interval.start.iso(), scans[i].interval.end.iso(), s.high_clusters,
                                    s.low_clusters, s.high_area_km2, s.high_pct, s.low_area_km2, s.low_pct,
                                    s.overlap_area_km2, s.overlap_pct, s.cluster_area_km2, s.cluster_pct);
        descriptive.push_back(descriptive_stats_to_json(s));
    }

    std::string transitions_csv =
        "from,to,high_high_km2,high_high_pct_from,high_high_pct_to,low_low_km2,low_low_pct_from,low_low_pct_to,"
        "high_low_km2,high_low_pct_from,high_low_pct_to,low_high_km2,low_high_pct_from,low_high_pct_to\n";
    json transitions = json::array();
    for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
        const TransitionStats t = transition_stats(grids[i], grids[i + 1]);
        auto cols = [](const TransitionEntry& e) {
            return fmt::format("{},{},{}", e.area_km2, e.pct_of_source, e.pct_of_destination);
        };
        transitions_csv += fmt::format("{},{},{},{},{},{}\n", t.from_interval, t.to_interval, cols(t.high_high),
                                       cols(t.low_low), cols(t.high_low), cols(t.low_high));
        transitions.push_back(transition_stats_to_json(t));
    }

    stage("write outputs", [&] {
        prepare_output(config);
        write_file(dir / "table_clusters.csv", clusters_csv);
        write_file(dir / "table_transitions.csv", transitions_csv);
        write_file(dir / "report.json",
                   json{{"descriptive", descriptive}, {"transitions", transitions}}.dump(2) + "\n");
        for (std::size_t i = 0; i < grids.size(); ++i) {
            const auto& iv = scans[i].interval;
            write_file(dir / fmt::format("map_{}.svg", iv.index),
                       risk_grid_svg(grids[i], &study.region,
                                     fmt::format("Interval {} ({} to {}): relative risk", iv.index, iv.start.iso(),
                                                 iv.end.iso())));
        }
        return 0;
    });
}

std::string cmd_validate(const RunConfig& config) {
    const StudyData study = load_study(config);
    const WindowSet windows = stage("windows", [&] { return WindowSet(study.region, config.max_fraction, 1); });
    std::string out = fmt::format("{} locations, total population {}, {} candidate windows\n", study.region.size(),
                                  study.region.total_population(), windows.size());
    for (const IntervalCounts& c : study.counts) {
        out += fmt::format("interval {}: {} to {}, {} cases{}\n", c.interval.index, c.interval.start.iso(),
                           c.interval.end.iso(), c.total_observed,
                           c.clamped > 0 ? fmt::format(" ({} locations clamped)", c.clamped) : std::string());
    }
    out += "\neffective configuration:\n";
    out += serialize_config(config);
    return out;
}

}  // namespace riskscan
