#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "riskscan/risk_surface.hpp"

namespace riskscan {

using Grid = Eigen::MatrixXd;

/// T_1 ... T_k, all of one shape, k >= 3.
class RiskSequence {
public:
    explicit RiskSequence(std::vector<Grid> grids);
    static RiskSequence from_risk_grids(const std::vector<RiskGrid>& grids);

    std::size_t size() const { return grids_.size(); }
    /// 1-based, matching T_1 ... T_k.
    const Grid& at(std::size_t i) const { return grids_.at(i - 1); }
    const Grid& last() const { return grids_.back(); }
    const std::vector<Grid>& grids() const { return grids_; }

    /// T_1 ... T_{k-1}.
    RiskSequence without_last() const;

private:
    std::vector<Grid> grids_;
};

/// Sum of squared cell differences. Throws std::invalid_argument on a
/// shape mismatch.
double sse_distance(const Grid& a, const Grid& b);

/// alpha * a + (1 - alpha) * b, cell by cell.
Grid convex_combination(double alpha, const Grid& a, const Grid& b);

/// Simple OLS of T_2 cells on T_1 cells, used to seed the smoothing
/// recursion. A constant T_1 gives slope 0 and intercept mean(T_2).
struct SeedRegression {
    double intercept = 0.0;
    double slope = 0.0;
    Grid fitted;
};

SeedRegression seed_regression(const Grid& first, const Grid& second);

/// Smoothed estimates T~_3 ... T~_k (k - 2 grids):
///   T~_3 = a T_2 + (1 - a) T^_2,   T~_i = a T_{i-1} + (1 - a) T~_{i-1}.
/// Throws InputError for alpha outside [0, 1].
std::vector<Grid> exp_smooth(const RiskSequence& seq, double alpha);
std::vector<Grid> exp_smooth(const RiskSequence& seq, double alpha, const Grid& seed_fitted);

enum class CorrectorMethod { exponential_smoothing, multiple_linear_regression };

std::string_view to_string(CorrectorMethod m);

struct CorrectorFit {
    CorrectorMethod method = CorrectorMethod::multiple_linear_regression;
    /// Regression: a_0, a_1 ... a_{k-1}. Smoothing: {alpha}.
    std::vector<double> coefficients;
    Grid corrected;
    double sse = 0.0;
    bool ridge = false;
};

/// Least-squares fit T_k ~ a_0 + sum_i a_i T_i over i = 1 .. k-1, one
/// observation per cell. Slopes are solved from the centred normal
/// equations; if that Gram matrix is singular, 1e-8 is added to its
/// diagonal. The intercept is recovered from the means.
CorrectorFit mlr_fit(const RiskSequence& seq);

/// Sum over i = 3..k of d(T~_i(alpha), T_i).
double alpha_objective(const RiskSequence& seq, double alpha);

/// Grid search over {0, step, 2 step, ..., 1}; the smallest minimiser wins.
/// `step` must divide 1.
double optimize_alpha(const RiskSequence& seq, double step = 0.01, unsigned workers = 1);

struct ForecastResult {
    Grid predicted;
    double alpha_star = 0.0;
    CorrectorMethod chosen = CorrectorMethod::multiple_linear_regression;
    CorrectorFit smoothing;
    CorrectorFit regression;
    SeedRegression seed;

    const CorrectorFit& chosen_fit() const {
        return chosen == CorrectorMethod::exponential_smoothing ? smoothing : regression;
    }
};

/// T*_{k+1} = a* T_k + (1 - a*) C, where C is whichever of T~_k(a*) and T^_k
/// lies closer to T_k in SSE (regression on ties).
ForecastResult predict_next(const RiskSequence& seq, double step = 0.01, unsigned workers = 1);

nlohmann::json forecast_to_json(const ForecastResult& result);

}  // namespace riskscan
