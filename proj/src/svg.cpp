#include "riskscan/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace riskscan {

namespace {

constexpr double kDisplayMaxRr = 3.0;

std::string ramp(double rr) {
    const double v = std::clamp(rr, 0.0, kDisplayMaxRr);
    double r = 255.0;
    double g = 255.0;
    double b = 255.0;
    if (v < 1.0) {
        // blue (33, 102, 172) -> white
        r = 33.0 + (255.0 - 33.0) * v;
        g = 102.0 + (255.0 - 102.0) * v;
        b = 172.0 + (255.0 - 172.0) * v;
    } else {
        // white -> red (178, 24, 43)
        const double t = (v - 1.0) / (kDisplayMaxRr - 1.0);
        r = 255.0 + (178.0 - 255.0) * t;
        g = 255.0 + (24.0 - 255.0) * t;
        b = 255.0 + (43.0 - 255.0) * t;
    }
    return fmt::format("#{:02x}{:02x}{:02x}", static_cast<int>(std::lround(r)), static_cast<int>(std::lround(g)),
                       static_cast<int>(std::lround(b)));
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string risk_grid_svg(const RiskGrid& grid, const StudyRegion* region, const std::string& title) {
    const GridSpec& spec = grid.spec;
    constexpr double cell = 10.0;
    constexpr double header = 24.0;
    const double width = spec.cols * cell;
    const double height = spec.rows * cell + header;

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", width,
        height, width, height);
    out += fmt::format("<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
                       escape(title));
    for (int row = 0; row < spec.rows; ++row) {
        for (int col = 0; col < spec.cols; ++col) {
            out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", col * cell,
                               header + row * cell, cell, cell, ramp(grid.values(row, col)));
        }
    }
    if (region != nullptr) {
        for (const Location& loc : region->locations()) {
            const double x = (loc.position.lon - spec.lon_min) / spec.cell_width_deg() * cell;
            const double y = header + (spec.lat_max - loc.position.lat) / spec.cell_height_deg() * cell;
            if (x < 0 || x > width || y < header || y > height) {
                continue;
            }
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"#333333\"/>\n", x, y);
        }
    }
    out += "</svg>\n";
    return out;
}

std::string scatter_svg(const Grid& predicted, const Grid& observed, std::optional<double> r_squared,
                        const std::string& title) {
    constexpr double size = 400.0;
    constexpr double margin = 40.0;
    double lo = std::min(predicted.minCoeff(), observed.minCoeff());
    double hi = std::max(predicted.maxCoeff(), observed.maxCoeff());
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    auto px = [&](double v) { return margin + (v - lo) / (hi - lo) * (size - 2 * margin); };
    auto py = [&](double v) { return size - margin - (v - lo) / (hi - lo) * (size - 2 * margin); };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n", size);
    out += fmt::format("<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n", margin,
                       escape(title));
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#999999\"/>\n", px(lo),
                       py(lo), px(hi), py(hi));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">observed</text>\n",
                       size / 2 - 20, size - 10);
    out += fmt::format(
        "<text x=\"12\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 12 {})\">"
        "predicted</text>\n",
        size / 2 + 20, size / 2 + 20);
    for (Eigen::Index i = 0; i < observed.size(); ++i) {
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"#2166ac\" fill-opacity=\"0.5\"/>\n",
                           px(observed.data()[i]), py(predicted.data()[i]));
    }
    const std::string label = r_squared ? fmt::format("R^2 = {:.5f}", *r_squared) : std::string("R^2 undefined");
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n", margin + 6,
                       margin + 14, label);
    out += "</svg>\n";
    return out;
}

}  // namespace riskscan
