#include "riskscan/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "riskscan/cases.hpp"
#include "riskscan/error.hpp"

namespace riskscan {

namespace fs = std::filesystem;

std::vector<Date> default_boundaries() {
    std::vector<Date> out;
    for (const char* d : {"2020-05-24", "2020-09-13", "2021-03-14", "2021-06-13", "2021-10-31", "2022-03-13",
                          "2022-10-16", "2023-03-12"}) {
        out.push_back(Date::parse(d));
    }
    return out;
}

void RunConfig::validate() const {
    intervals_from_boundaries(boundaries);
    if (!(max_fraction > 0.0 && max_fraction <= 1.0)) {
        throw InputError(fmt::format("max_fraction must be in (0, 1], got {}", max_fraction));
    }
    if (replications < 1) {
        throw InputError(fmt::format("replications must be >= 1, got {}", replications));
    }
    if (!(significance > 0.0 && significance <= 1.0)) {
        throw InputError(fmt::format("significance must be in (0, 1], got {}", significance));
    }
    grid.validate();
    const double steps = std::round(1.0 / grid_step);
    if (!(grid_step > 0.0 && grid_step <= 1.0) || std::abs(steps * grid_step - 1.0) > 1e-9) {
        throw InputError(fmt::format("grid_step must divide 1, got {}", grid_step));
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, int line) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw InputError(fmt::format("config line {}: cannot parse {} value '{}'", line, key, value));
    }
    return out;
}

std::string resolve_path(const std::string& value, const std::string& base_dir) {
    const fs::path p(value);
    if (p.is_absolute() || base_dir.empty()) {
        return p.lexically_normal().string();
    }
    return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig cfg, const std::string& base_dir) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(raw.substr(0, raw.find('#')));
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw InputError(fmt::format("config line {}: expected 'key = value'", line));
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));

        if (key == "population") {
            cfg.population_path = resolve_path(value, base_dir);
        } else if (key == "cases") {
            cfg.cases_path = resolve_path(value, base_dir);
        } else if (key == "output_dir") {
            cfg.output_dir = resolve_path(value, base_dir);
        } else if (key == "boundaries") {
            cfg.boundaries.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                try {
                    cfg.boundaries.push_back(Date::parse(trim(item)));
                } catch (const InputError& e) {
                    throw InputError(fmt::format("config line {}: {}", line, e.what()));
                }
            }
        } else if (key == "max_fraction") {
            cfg.max_fraction = parse_number<double>(key, value, line);
        } else if (key == "replications") {
            cfg.replications = parse_number<int>(key, value, line);
        } else if (key == "significance") {
            cfg.significance = parse_number<double>(key, value, line);
        } else if (key == "grid_rows") {
            cfg.grid.rows = parse_number<int>(key, value, line);
        } else if (key == "grid_cols") {
            cfg.grid.cols = parse_number<int>(key, value, line);
        } else if (key == "lat_min") {
            cfg.grid.lat_min = parse_number<double>(key, value, line);
        } else if (key == "lat_max") {
            cfg.grid.lat_max = parse_number<double>(key, value, line);
        } else if (key == "lon_min") {
            cfg.grid.lon_min = parse_number<double>(key, value, line);
        } else if (key == "lon_max") {
            cfg.grid.lon_max = parse_number<double>(key, value, line);
        } else if (key == "grid_step") {
            cfg.grid_step = parse_number<double>(key, value, line);
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(key, value, line);
        } else if (key == "workers") {
            cfg.workers = parse_number<unsigned>(key, value, line);
        } else {
            throw InputError(fmt::format("config line {}: unknown key '{}'", line, key));
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(fmt::format("cannot open config '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), RunConfig{}, fs::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& c) {
    std::vector<std::string> dates;
    for (const Date& d : c.boundaries) {
        dates.push_back(d.iso());
    }
    std::string out;
    out += fmt::format("population = \"{}\"\n", c.population_path);
    out += fmt::format("cases = \"{}\"\n", c.cases_path);
    out += fmt::format("boundaries = {}\n", fmt::join(dates, ", "));
    out += fmt::format("max_fraction = {}\n", c.max_fraction);
    out += fmt::format("replications = {}\n", c.replications);
    out += fmt::format("significance = {}\n", c.significance);
    out += fmt::format("grid_rows = {}\n", c.grid.rows);
    out += fmt::format("grid_cols = {}\n", c.grid.cols);
    out += fmt::format("lat_min = {}\n", c.grid.lat_min);
    out += fmt::format("lat_max = {}\n", c.grid.lat_max);
    out += fmt::format("lon_min = {}\n", c.grid.lon_min);
    out += fmt::format("lon_max = {}\n", c.grid.lon_max);
    out += fmt::format("grid_step = {}\n", c.grid_step);
    out += fmt::format("seed = {}\n", c.seed);
    return out;
}

}  // namespace riskscan
