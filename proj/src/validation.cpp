#include "riskscan/validation.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace riskscan {

using nlohmann::json;

std::optional<double> coefficient_of_variation(double mean, double sd) {
    if (mean == 0.0) {
        return std::nullopt;
    }
    return sd / mean * 100.0;
}

namespace {

// Mean and sum of squared deviations, accumulated relative to the first
// value so that constant input gives exactly zero spread.
std::pair<double, double> mean_and_ss(std::span<const double> values) {
    const double shift = values.front();
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v - shift;
    }
    const double offset = sum / n;
    double ss = 0.0;
    for (double v : values) {
        const double d = (v - shift) - offset;
        ss += d * d;
    }
    return {shift + offset, ss};
}

}  // namespace

CvStats cv_stats(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("cv_stats: empty input");
    }
    const auto [mean, ss] = mean_and_ss(values);
    CvStats out;
    out.mean = mean;
    if (values.size() > 1) {
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.cv_pct = coefficient_of_variation(out.mean, out.sd);
    return out;
}

CvStats cv_stats(const Grid& grid) { return cv_stats(std::span<const double>(grid.data(), grid.size())); }

FitMetrics fit_metrics(const Grid& predicted, const Grid& observed) {
    FitMetrics out;
    out.sse = sse_distance(predicted, observed);
    out.mse = out.sse / static_cast<double>(observed.size());
    const double sst = mean_and_ss(std::span<const double>(observed.data(), observed.size())).second;
    if (sst > 0.0) {
        out.r_squared = 1.0 - out.sse / sst;
    }
    return out;
}

ValidationReport compare_models(const RiskSequence& seq, const Grid& observed_next, double step, unsigned workers) {
    if (observed_next.rows() != seq.last().rows() || observed_next.cols() != seq.last().cols()) {
        throw std::invalid_argument("compare_models: held-out grid shape differs from the sequence");
    }
    ValidationReport report;
    const ForecastResult balanced = predict_next(seq, step, workers);
    report.chosen_method = std::string(to_string(balanced.chosen));
    report.alpha_star = balanced.alpha_star;

    const double es_alpha = optimize_alpha(seq, step, workers);
    const Grid es_last = exp_smooth(seq, es_alpha).back();
    Grid es_next = convex_combination(es_alpha, seq.last(), es_last);

    report.models.push_back({"balanced", balanced.alpha_star, fit_metrics(balanced.predicted, observed_next),
                             balanced.predicted});
    report.models.push_back({"multiple_linear_regression", 0.0,
                             fit_metrics(balanced.regression.corrected, observed_next),
                             balanced.regression.corrected});
    report.models.push_back({"exponential_smoothing", es_alpha, fit_metrics(es_next, observed_next), std::move(es_next)});

    for (std::size_t i = 1; i <= seq.size(); ++i) {
        report.cv_rows.push_back({fmt::format("T{}", i), cv_stats(seq.at(i))});
    }
    report.cv_rows.push_back({fmt::format("T{}", seq.size() + 1), cv_stats(observed_next)});
    report.predicted_cv = cv_stats(balanced.predicted);
    return report;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_text(const std::optional<double>& v, int precision) {
    return v ? fmt::format("{:.{}f}", *v, precision) : std::string("n/a");
}

json cv_json(const CvStats& s) { return json{{"mean", s.mean}, {"sd", s.sd}, {"cv_pct", optional_json(s.cv_pct)}}; }

}  // namespace

json validation_to_json(const ValidationReport& report) {
    json models = json::array();
    for (const ModelRow& m : report.models) {
        models.push_back(json{{"model", m.name},
                              {"alpha", m.alpha},
                              {"r_squared", optional_json(m.metrics.r_squared)},
                              {"mse", m.metrics.mse},
                              {"sse", m.metrics.sse}});
    }
    json cv = json::array();
    for (const CvRow& row : report.cv_rows) {
        json entry = cv_json(row.stats);
        entry["label"] = row.label;
        cv.push_back(std::move(entry));
    }
    return json{{"alpha_star", report.alpha_star},
                {"chosen_method", report.chosen_method},
                {"models", std::move(models)},
                {"cv", std::move(cv)},
                {"predicted_cv", cv_json(report.predicted_cv)}};
}

std::string validation_to_text(const ValidationReport& report) {
    std::string out = fmt::format("alpha* = {:.2f}   corrector = {}\n\n", report.alpha_star, report.chosen_method);
    out += fmt::format("{:<28} {:>8} {:>10} {:>12}\n", "model", "alpha", "R^2", "MSE");
    for (const ModelRow& m : report.models) {
        out += fmt::format("{:<28} {:>8.2f} {:>10} {:>12.6f}\n", m.name, m.alpha, optional_text(m.metrics.r_squared, 5),
                           m.metrics.mse);
    }
    out += fmt::format("\n{:<8} {:>10} {:>10} {:>10}\n", "grid", "mean", "SD", "CV (%)");
    auto row = [&](const std::string& label, const CvStats& s) {
        out += fmt::format("{:<8} {:>10.4f} {:>10.4f} {:>10}\n", label, s.mean, s.sd, optional_text(s.cv_pct, 2));
    };
    for (const CvRow& r : report.cv_rows) {
        row(r.label, r.stats);
    }
    row(fmt::format("T{}*", report.cv_rows.size()), report.predicted_cv);
    return out;
}

}  // namespace riskscan
