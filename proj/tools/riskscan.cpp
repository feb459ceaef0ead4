// Batch driver: scan -> rasterize -> forecast -> validate -> report.
//
// Exit codes: 0 success, 1 input error, 2 internal error.
// Log verbosity comes from RISKSCAN_LOG (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "riskscan/config.hpp"
#include "riskscan/error.hpp"
#include "riskscan/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> replications;
    std::optional<double> grid_step;
    std::optional<double> max_fraction;
    std::optional<unsigned> workers;
};

riskscan::RunConfig effective_config(const Overrides& o) {
    riskscan::RunConfig cfg = o.config_path.empty() ? riskscan::RunConfig{} : riskscan::load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    if (o.replications) cfg.replications = *o.replications;
    if (o.grid_step) cfg.grid_step = *o.grid_step;
    if (o.max_fraction) cfg.max_fraction = *o.max_fraction;
    if (o.workers) cfg.workers = *o.workers;
    return cfg;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("riskscan");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("RISKSCAN_LOG")) {
        spdlog::set_level(spdlog::level::from_str(level));
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Spatial scan clustering and relative-risk forecasting"};
    app.require_subcommand(1);
    Overrides o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "Run configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--seed", o.seed, "Monte Carlo seed");
        cmd->add_option("--out", o.out, "Output directory");
        cmd->add_option("--replications", o.replications, "Monte Carlo replications");
        cmd->add_option("--grid-step", o.grid_step, "Step of the alpha grid search");
        cmd->add_option("--max-fraction", o.max_fraction, "Maximum window population fraction");
        cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores); never changes outputs");
    };

    auto* scan = app.add_subcommand("scan", "Scan every interval for high and low relative-risk clusters");
    auto* forecast = app.add_subcommand("forecast", "Predict the last interval's risk grid from the earlier ones");
    auto* report = app.add_subcommand("report", "Cluster and transition tables with per-interval maps");
    auto* validate = app.add_subcommand("validate", "Check configuration and inputs");
    for (auto* cmd : {scan, forecast, report, validate}) {
        add_common(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const riskscan::RunConfig cfg = effective_config(o);
        if (scan->parsed()) {
            const auto results = riskscan::cmd_scan(cfg);
            std::cout << fmt::format("scanned {} intervals into {}\n", results.size(), cfg.output_dir);
        } else if (forecast->parsed()) {
            const auto run = riskscan::cmd_forecast(cfg);
            std::cout << fmt::format("predicted interval {} (alpha* = {:.2f}, corrector = {}) into {}\n",
                                     run.grids.back().interval_index, run.forecast.alpha_star,
                                     riskscan::to_string(run.forecast.chosen), cfg.output_dir);
        } else if (report->parsed()) {
            riskscan::cmd_report(cfg);
            std::cout << fmt::format("wrote report tables into {}\n", cfg.output_dir);
        } else if (validate->parsed()) {
            std::cout << riskscan::cmd_validate(cfg);
        }
    } catch (const riskscan::InputError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return 2;
    }
    return 0;
}
