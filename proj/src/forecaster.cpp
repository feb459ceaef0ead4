#include "riskscan/forecaster.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "riskscan/error.hpp"
#include "riskscan/parallel.hpp"

namespace riskscan {

using nlohmann::json;

namespace {

constexpr double kRidge = 1e-8;

Eigen::Map<const Eigen::VectorXd> flat(const Grid& g) { return {g.data(), g.size()}; }

bool is_constant(const Grid& g) { return g.size() == 0 || (g.array() == g(0, 0)).all(); }

void require_same_shape(const Grid& a, const Grid& b, const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(
            fmt::format("{}: shape mismatch {}x{} vs {}x{}", where, a.rows(), a.cols(), b.rows(), b.cols()));
    }
}

}  // namespace

RiskSequence::RiskSequence(std::vector<Grid> grids) : grids_(std::move(grids)) {
    if (grids_.size() < 3) {
        throw InputError(fmt::format("risk sequence needs at least 3 grids, got {}", grids_.size()));
    }
    for (const Grid& g : grids_) {
        if (g.size() == 0 || g.rows() != grids_.front().rows() || g.cols() != grids_.front().cols()) {
            throw InputError("risk sequence grids must share one non-empty shape");
        }
        if (!g.allFinite()) {
            throw InputError("risk sequence grids must be finite");
        }
    }
}

RiskSequence RiskSequence::from_risk_grids(const std::vector<RiskGrid>& grids) {
    std::vector<Grid> values;
    for (const RiskGrid& g : grids) {
        if (!(g.spec == grids.front().spec)) {
            throw InputError("risk sequence grids must share one GridSpec");
        }
        values.push_back(g.values);
    }
    return RiskSequence(std::move(values));
}

RiskSequence RiskSequence::without_last() const {
    return RiskSequence(std::vector<Grid>(grids_.begin(), grids_.end() - 1));
}

double sse_distance(const Grid& a, const Grid& b) {
    require_same_shape(a, b, "sse_distance");
    return (a - b).squaredNorm();
}

Grid convex_combination(double alpha, const Grid& a, const Grid& b) {
    require_same_shape(a, b, "convex_combination");
    Grid out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.data()[i] = alpha * a.data()[i] + (1.0 - alpha) * b.data()[i];
    }
    return out;
}

SeedRegression seed_regression(const Grid& first, const Grid& second) {
    require_same_shape(first, second, "seed_regression");
    const auto x = flat(first);
    const auto y = flat(second);
    SeedRegression out;
    const double y_mean = y.mean();
    if (is_constant(first)) {
        out.slope = 0.0;
        out.intercept = y_mean;
    } else {
        const double x_mean = x.mean();
        const Eigen::ArrayXd dx = x.array() - x_mean;
        out.slope = (dx * (y.array() - y_mean)).sum() / dx.square().sum();
        out.intercept = y_mean - out.slope * x_mean;
    }
    out.fitted = (out.intercept + out.slope * first.array()).matrix();
    return out;
}

std::vector<Grid> exp_smooth(const RiskSequence& seq, double alpha, const Grid& seed_fitted) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InputError(fmt::format("smoothing alpha must be in [0, 1], got {}", alpha));
    }
    std::vector<Grid> out;
    out.reserve(seq.size() - 2);
    const Grid* previous = &seed_fitted;
    for (std::size_t i = 3; i <= seq.size(); ++i) {
        out.push_back(convex_combination(alpha, seq.at(i - 1), *previous));
        previous = &out.back();
    }
    return out;
}

std::vector<Grid> exp_smooth(const RiskSequence& seq, double alpha) {
    return exp_smooth(seq, alpha, seed_regression(seq.at(1), seq.at(2)).fitted);
}

std::string_view to_string(CorrectorMethod m) {
    return m == CorrectorMethod::exponential_smoothing ? "exponential_smoothing" : "multiple_linear_regression";
}

CorrectorFit mlr_fit(const RiskSequence& seq) {
    const std::size_t k = seq.size();
    const Eigen::Index predictors = static_cast<Eigen::Index>(k - 1);
    const Eigen::Index cells = seq.last().size();
    if (cells < static_cast<Eigen::Index>(k)) {
        throw InputError(fmt::format("regression needs at least as many cells ({}) as coefficients ({})", cells, k));
    }

    Eigen::MatrixXd x(cells, predictors);
    for (Eigen::Index i = 0; i < predictors; ++i) {
        x.col(i) = flat(seq.at(static_cast<std::size_t>(i) + 1));
    }
    const Eigen::VectorXd y = flat(seq.last());
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::MatrixXd gram = xc.transpose() * xc;
    const Eigen::VectorXd rhs = xc.transpose() * yc;

    CorrectorFit fit;
    fit.method = CorrectorMethod::multiple_linear_regression;
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    const double largest = eig.maxCoeff();
    if (!(largest > 0.0) || eig.minCoeff() <= 1e-12 * largest) {
        gram.diagonal().array() += kRidge;
        fit.ridge = true;
    }
    const Eigen::VectorXd slopes = gram.ldlt().solve(rhs);

    fit.coefficients.resize(k);
    fit.coefficients[0] = y_mean - x_mean.dot(slopes);
    for (Eigen::Index i = 0; i < predictors; ++i) {
        fit.coefficients[static_cast<std::size_t>(i) + 1] = slopes(i);
    }
    Grid corrected = Grid::Constant(seq.last().rows(), seq.last().cols(), fit.coefficients[0]);
    for (std::size_t i = 1; i < k; ++i) {
        corrected += fit.coefficients[i] * seq.at(i);
    }
    fit.corrected = std::move(corrected);
    fit.sse = sse_distance(fit.corrected, seq.last());
    return fit;
}

namespace {

double objective_with_seed(const RiskSequence& seq, double alpha, const Grid& seed_fitted) {
    const auto smoothed = exp_smooth(seq, alpha, seed_fitted);
    double total = 0.0;
    for (std::size_t i = 3; i <= seq.size(); ++i) {
        total += sse_distance(smoothed[i - 3], seq.at(i));
    }
    return total;
}

int alpha_steps(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw InputError(fmt::format("alpha grid step must be in (0, 1], got {}", step));
    }
    const double count = std::round(1.0 / step);
    if (std::abs(count * step - 1.0) > 1e-9) {
        throw InputError(fmt::format("alpha grid step {} does not divide 1", step));
    }
    return static_cast<int>(count);
}

}  // namespace

double alpha_objective(const RiskSequence& seq, double alpha) {
    return objective_with_seed(seq, alpha, seed_regression(seq.at(1), seq.at(2)).fitted);
}

double optimize_alpha(const RiskSequence& seq, double step, unsigned workers) {
    const int steps = alpha_steps(step);
    const Grid seed_fitted = seed_regression(seq.at(1), seq.at(2)).fitted;
    std::vector<double> objective(static_cast<std::size_t>(steps) + 1);
    parallel_for(objective.size(), workers, [&](std::size_t j) {
        objective[j] = objective_with_seed(seq, static_cast<double>(j) / steps, seed_fitted);
    });
    std::size_t best = 0;
    for (std::size_t j = 1; j < objective.size(); ++j) {
        if (objective[j] < objective[best]) {
            best = j;
        }
    }
    return static_cast<double>(best) / steps;
}

ForecastResult predict_next(const RiskSequence& seq, double step, unsigned workers) {
    ForecastResult out;
    out.seed = seed_regression(seq.at(1), seq.at(2));
    out.alpha_star = optimize_alpha(seq, step, workers);

    out.smoothing.method = CorrectorMethod::exponential_smoothing;
    out.smoothing.coefficients = {out.alpha_star};
    out.smoothing.corrected = exp_smooth(seq, out.alpha_star, out.seed.fitted).back();
    out.smoothing.sse = sse_distance(out.smoothing.corrected, seq.last());

    out.regression = mlr_fit(seq);

    out.chosen = out.smoothing.sse < out.regression.sse ? CorrectorMethod::exponential_smoothing
                                                         : CorrectorMethod::multiple_linear_regression;
    out.predicted = convex_combination(out.alpha_star, seq.last(), out.chosen_fit().corrected);
    return out;
}

json forecast_to_json(const ForecastResult& result) {
    return json{
        {"alpha_star", result.alpha_star},
        {"chosen_method", to_string(result.chosen)},
        {"seed_regression", {{"intercept", result.seed.intercept}, {"slope", result.seed.slope}}},
        {"exponential_smoothing", {{"alpha", result.alpha_star}, {"sse", result.smoothing.sse}}},
        {"multiple_linear_regression",
         {{"coefficients", result.regression.coefficients},
          {"sse", result.regression.sse},
          {"ridge", result.regression.ridge}}},
        {"rows", result.predicted.rows()},
        {"cols", result.predicted.cols()},
    };
}

}  // namespace riskscan
