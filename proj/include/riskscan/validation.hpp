#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskscan/forecaster.hpp"

namespace riskscan {

struct CvStats {
    double mean = 0.0;
    double sd = 0.0;               // sample (n - 1) denominator
    std::optional<double> cv_pct;  // absent when mean == 0
};

/// SD / mean * 100, absent when mean == 0.
std::optional<double> coefficient_of_variation(double mean, double sd);

CvStats cv_stats(std::span<const double> values);
CvStats cv_stats(const Grid& grid);

struct FitMetrics {
    std::optional<double> r_squared;  // absent when the observed grid is constant
    double mse = 0.0;
    double sse = 0.0;
};

FitMetrics fit_metrics(const Grid& predicted, const Grid& observed);

struct ModelRow {
    std::string name;
    double alpha = 0.0;  // only meaningful for the smoothing-based rows
    FitMetrics metrics;
    Grid prediction;
};

struct CvRow {
    std::string label;
    CvStats stats;
};

struct ValidationReport {
    /// T_1 ... T_k and the held-out observation, in that order.
    std::vector<CvRow> cv_rows;
    CvStats predicted_cv;
    /// balanced, multiple_linear_regression, exponential_smoothing.
    std::vector<ModelRow> models;
    std::string chosen_method;
    double alpha_star = 0.0;
};

/// Predicts T_{k+1} three ways and scores each against `observed_next`:
/// the balanced predictor-corrector, the regression estimate T^_k alone, and
/// one-step exponential smoothing a T_k + (1 - a) T~_k at its own optimal a.
ValidationReport compare_models(const RiskSequence& seq, const Grid& observed_next, double step = 0.01,
                                unsigned workers = 1);

nlohmann::json validation_to_json(const ValidationReport& report);
std::string validation_to_text(const ValidationReport& report);

}  // namespace riskscan
