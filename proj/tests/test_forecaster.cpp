#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "riskscan/error.hpp"
#include "riskscan/forecaster.hpp"
#include "forecast_oracle.hpp"

using namespace riskscan;
namespace fo = riskscan::oracle;

namespace {

Grid random_grid(std::mt19937_64& rng, int rows, int cols, double lo = 0.3, double hi = 2.5) {
    std::uniform_real_distribution<double> u(lo, hi);
    Grid g(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            g(r, c) = u(rng);
        }
    }
    return g;
}

Grid filled(int rows, int cols, double v) { return Grid::Constant(rows, cols, v); }

}  // namespace

TEST_CASE("sse_distance examples") {
    std::mt19937_64 rng(1);
    const Grid a = random_grid(rng, 2, 2);
    CHECK(sse_distance(a, a) == 0.0);
    CHECK(sse_distance(a, (a.array() + 0.1).matrix()) == doctest::Approx(0.04).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) {
        const Grid x = random_grid(rng, 5, 5);
        const Grid y = random_grid(rng, 5, 5);
        CHECK(std::abs(sse_distance(x, y) - fo::sse(x, y)) <= 1e-12);
    }
    CHECK_THROWS_AS(sse_distance(filled(2, 2, 1), filled(2, 3, 1)), std::invalid_argument);
}

TEST_CASE("convex_combination endpoints") {
    std::mt19937_64 rng(2);
    const Grid a = random_grid(rng, 3, 4);
    const Grid b = random_grid(rng, 3, 4);
    CHECK(convex_combination(1.0, a, b) == a);
    CHECK(convex_combination(0.0, a, b) == b);
}

TEST_CASE("seed_regression examples") {
    std::mt19937_64 rng(3);
    SUBCASE("exact linear relation") {
        const Grid t1 = random_grid(rng, 4, 6);
        const Grid t2 = (2.0 * t1.array() + 0.5).matrix();
        const auto s = seed_regression(t1, t2);
        CHECK(s.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s.intercept == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(sse_distance(s.fitted, t2) < 1e-18);
    }
    SUBCASE("constant first grid") {
        const Grid t2 = random_grid(rng, 3, 3);
        const auto s = seed_regression(filled(3, 3, 1.0), t2);
        CHECK(s.slope == 0.0);
        CHECK(s.intercept == doctest::Approx(t2.mean()).epsilon(1e-14));
    }
    SUBCASE("matches a closed-form OLS oracle") {
        for (int i = 0; i < 10; ++i) {
            const Grid t1 = random_grid(rng, 5, 4);
            const Grid t2 = random_grid(rng, 5, 4);
            const auto s = seed_regression(t1, t2);
            const auto [a, b] = fo::simple_ols(t1, t2);
            CHECK(std::abs(s.intercept - a) <= 1e-12);
            CHECK(std::abs(s.slope - b) <= 1e-12);
        }
    }
}

TEST_CASE("exp_smooth examples") {
    std::mt19937_64 rng(4);
    std::vector<Grid> grids;
    for (int i = 0; i < 6; ++i) {
        grids.push_back(random_grid(rng, 3, 4));
    }
    const RiskSequence seq(grids);
    const auto seed = seed_regression(seq.at(1), seq.at(2));

    SUBCASE("alpha 0 freezes the seed") {
        const auto s = exp_smooth(seq, 0.0);
        REQUIRE(s.size() == 4);
        for (const auto& g : s) {
            CHECK(g == seed.fitted);
        }
    }
    SUBCASE("alpha 1 copies the previous observation") {
        const auto s = exp_smooth(seq, 1.0);
        for (std::size_t i = 3; i <= 6; ++i) {
            CHECK(s[i - 3] == seq.at(i - 1));
        }
    }
    SUBCASE("constant sequence is a fixed point") {
        const RiskSequence flat({filled(2, 2, 1.3), filled(2, 2, 1.3), filled(2, 2, 1.3)});
        const auto s = exp_smooth(flat, 0.5);
        REQUIRE(s.size() == 1);
        CHECK((s[0].array() == 1.3).all());
    }
    SUBCASE("invalid alpha") {
        CHECK_THROWS_AS(exp_smooth(seq, -0.01), InputError);
        CHECK_THROWS_AS(exp_smooth(seq, 1.01), InputError);
    }
    SUBCASE("agrees with the loop oracle") {
        for (double alpha : {0.13, 0.5, 0.77}) {
            const auto s = exp_smooth(seq, alpha);
            const auto want = fo::smooth(seq.grids(), alpha);
            for (std::size_t i = 0; i < s.size(); ++i) {
                CHECK(fo::sse(s[i], want[i]) <= 1e-24);
            }
        }
    }
}

TEST_CASE("RiskSequence preconditions") {
    CHECK_THROWS_AS(RiskSequence({filled(2, 2, 1), filled(2, 2, 1)}), InputError);
    CHECK_THROWS_AS(RiskSequence({filled(2, 2, 1), filled(2, 2, 1), filled(3, 2, 1)}), InputError);
    CHECK_THROWS_AS(RiskSequence({filled(2, 2, 1), filled(2, 2, 1), filled(2, 2, NAN)}), InputError);
}

TEST_CASE("mlr_fit examples") {
    std::mt19937_64 rng(5);
    SUBCASE("exact linear model is recovered") {
        const Grid t1 = random_grid(rng, 5, 6);
        const Grid t2 = random_grid(rng, 5, 6);
        const Grid t3 = (0.1 + 0.3 * t1.array() + 0.7 * t2.array()).matrix();
        const auto fit = mlr_fit(RiskSequence({t1, t2, t3}));
        REQUIRE(fit.coefficients.size() == 3);
        CHECK(std::abs(fit.coefficients[0] - 0.1) <= 1e-8);
        CHECK(std::abs(fit.coefficients[1] - 0.3) <= 1e-8);
        CHECK(std::abs(fit.coefficients[2] - 0.7) <= 1e-8);
        CHECK(fit.sse < 1e-12);
        CHECK_FALSE(fit.ridge);
    }
    SUBCASE("constant predictors fall back to the mean") {
        const Grid tk = random_grid(rng, 3, 3);
        const auto fit = mlr_fit(RiskSequence({filled(3, 3, 1.0), filled(3, 3, 2.0), tk}));
        CHECK(fit.ridge);
        CHECK(std::abs(fit.coefficients[0] - tk.mean()) <= 1e-12);
        CHECK(std::abs(fit.coefficients[1]) <= 1e-12);
        CHECK(std::abs(fit.coefficients[2]) <= 1e-12);
    }
    SUBCASE("too few cells") {
        CHECK_THROWS_AS(mlr_fit(RiskSequence({filled(1, 2, 1), filled(1, 2, 2), filled(1, 2, 1), filled(1, 2, 3)})),
                        InputError);
    }
    SUBCASE("matches a dense least-squares oracle") {
        for (int i = 0; i < 10; ++i) {
            std::vector<Grid> g;
            for (int j = 0; j < 5; ++j) {
                g.push_back(random_grid(rng, 6, 7));
            }
            const auto fit = mlr_fit(RiskSequence(g));
            const auto want = fo::dense_ols(g);
            for (std::size_t j = 0; j < want.size(); ++j) {
                CHECK(std::abs(fit.coefficients[j] - want[j]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("optimize_alpha examples") {
    std::mt19937_64 rng(6);
    SUBCASE("perfect persistence picks 1") {
        // T_1 is chosen so the seed fit lands far from T_2.
        const Grid t2 = random_grid(rng, 4, 4);
        const Grid t1 = random_grid(rng, 4, 4);
        const RiskSequence seq({t1, t2, t2, t2, t2});
        CHECK(sse_distance(seed_regression(t1, t2).fitted, t2) > 0.1);
        CHECK(optimize_alpha(seq) == 1.0);
    }
    SUBCASE("everything equal to the seed picks 0 by tie-break") {
        // Constant T_1 makes T^_2 = mean(T_2); dyadic values keep it exact.
        const Grid t2 = filled(4, 4, 1.25);
        const RiskSequence seq({filled(4, 4, 0.75), t2, t2, t2});
        REQUIRE(seed_regression(seq.at(1), seq.at(2)).fitted == t2);
        CHECK(alpha_objective(seq, 0.0) == 0.0);
        CHECK(optimize_alpha(seq) == 0.0);
    }
    SUBCASE("planted minimiser near 0.37") {
        const double planted = 0.37;
        const Grid t1 = random_grid(rng, 6, 6);
        const Grid t2 = random_grid(rng, 6, 6);
        std::vector<Grid> g{t1, t2};
        // Each later T_i is the smoothed value at the planted alpha plus a
        // little noise, so the objective bottoms out near 0.37.
        const auto seed = fo::simple_ols(t1, t2);
        Grid smoothed = (seed.first + seed.second * t1.array()).matrix();
        std::normal_distribution<double> noise(0.0, 1e-3);
        for (int i = 3; i <= 7; ++i) {
            smoothed = planted * g.back() + (1.0 - planted) * smoothed;
            Grid next = smoothed;
            for (Eigen::Index j = 0; j < next.size(); ++j) {
                next.data()[j] += noise(rng);
            }
            g.push_back(next);
        }
        const RiskSequence seq(g);
        const double dense = fo::dense_alpha(g, 0.001);
        const double got = optimize_alpha(seq);
        CHECK(std::abs(dense - planted) <= 0.01);
        CHECK(std::abs(got - dense) <= 0.01);
        CHECK(std::abs(got - planted) <= 0.01);
    }
    SUBCASE("step must divide one") {
        const RiskSequence seq({filled(2, 2, 1), filled(2, 2, 2), filled(2, 2, 3)});
        CHECK_THROWS_AS(optimize_alpha(seq, 0.3), InputError);
        CHECK_THROWS_AS(optimize_alpha(seq, 0.0), InputError);
    }
}

TEST_CASE("predict_next examples") {
    std::mt19937_64 rng(7);
    SUBCASE("alpha* = 1 returns T_k") {
        const Grid t1 = random_grid(rng, 3, 3);
        const Grid t2 = random_grid(rng, 3, 3);
        const RiskSequence seq({t1, t2, t2, t2});
        const auto r = predict_next(seq);
        REQUIRE(r.alpha_star == 1.0);
        CHECK(r.predicted == seq.last());
    }
    SUBCASE("hand-computed 2x2, k = 4, exact linear dependence") {
        Grid t1(2, 2), t2(2, 2), t3(2, 2);
        t1 << 1.0, 1.5, 0.5, 2.0;
        t2 << 1.2, 0.8, 1.0, 1.6;
        t3 << 0.9, 1.1, 1.3, 0.7;
        const Grid t4 = (0.1 + 0.3 * t1.array() + 0.5 * t2.array() + 0.2 * t3.array()).matrix();
        const auto r = predict_next(RiskSequence({t1, t2, t3, t4}));
        CHECK(r.seed.intercept == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(r.seed.slope == doctest::Approx(0.28).epsilon(1e-12));
        CHECK(r.alpha_star == 0.0);
        CHECK(r.chosen == CorrectorMethod::multiple_linear_regression);
        CHECK(r.smoothing.sse == doctest::Approx(0.0958).epsilon(1e-10));
        const double want[] = {1.18, 1.01, 1.17, 1.64};  // column-major
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(r.predicted.data()[i] - want[i]) <= 1e-10);
        }
        // alpha* = 0 with regression chosen: the forecast is T^_k itself.
        CHECK(r.predicted == r.regression.corrected);
    }
    SUBCASE("frozen 3x3 oracle") {
        Grid t1(3, 3), t2(3, 3), t3(3, 3), t4(3, 3);
        t1 << 1, 1.4, .6, .8, 2, 1, 1, .5, 1.2;
        t2 << 1.1, 1.2, .7, .9, 1.8, 1, 1.3, .6, 1;
        t3 << 1, 1.3, .9, 1, 1.5, 1.1, 1.2, .8, .9;
        t4 << 1.05, 1.25, .85, .95, 1.6, 1, 1.25, .7, 1;
        const auto r = predict_next(RiskSequence({t1, t2, t3, t4}));
        CHECK(std::abs(r.seed.intercept - 0.29452054794520555) <= 1e-12);
        CHECK(std::abs(r.seed.slope - 0.7315068493150684) <= 1e-12);
        CHECK(r.alpha_star == doctest::Approx(0.56).epsilon(1e-12));
        CHECK(std::abs(r.smoothing.sse - 0.011100090722191766) <= 1e-12);
        CHECK(std::abs(r.regression.sse - 0.005640055400090776) <= 1e-12);
        CHECK(r.chosen == CorrectorMethod::multiple_linear_regression);
        const double coef[] = {0.13262885720768428, 0.03075839509907763, 0.4949279609741341, 0.3518378460142193};
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(r.regression.coefficients[static_cast<std::size_t>(i)] - coef[i]) <= 1e-10);
        }
        const double want[] = {1.0542441763727126, 0.95198377703827,   1.2407595673876877,
                               1.239877079866889,  1.6056200083194683, 0.7116314475873547,
                               0.8342425124792017, 1.0199482113144764, 0.9916932196339439};
        for (int i = 0; i < 9; ++i) {
            CHECK(std::abs(r.predicted.data()[i] - want[i]) <= 1e-10);
        }
    }
}

TEST_CASE("property: forecast invariants") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = std::uniform_int_distribution<int>(2, 6)(rng);
        const int cols = std::uniform_int_distribution<int>(3, 6)(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(3, 6)(rng);
        if (static_cast<std::size_t>(rows * cols) < k) {
            continue;
        }
        std::vector<Grid> g;
        for (std::size_t i = 0; i < k; ++i) {
            g.push_back(random_grid(rng, rows, cols));
        }
        const RiskSequence seq(g);
        const auto r = predict_next(seq);
        const Grid& corrected = r.chosen_fit().corrected;

        // Reconstruction and convex bounds, cell by cell.
        CHECK(convex_combination(r.alpha_star, seq.last(), corrected) == r.predicted);
        for (Eigen::Index j = 0; j < r.predicted.size(); ++j) {
            const double lo = std::min(seq.last().data()[j], corrected.data()[j]);
            const double hi = std::max(seq.last().data()[j], corrected.data()[j]);
            CHECK(r.predicted.data()[j] >= lo);
            CHECK(r.predicted.data()[j] <= hi);
        }
        CHECK(r.chosen_fit().sse == std::min(r.smoothing.sse, r.regression.sse));

        // OLS beats the intercept-only fit.
        const Grid mean_fit = Grid::Constant(rows, cols, seq.last().mean());
        CHECK(r.regression.sse <= sse_distance(mean_fit, seq.last()) + 1e-12);

        // Smoothed grids stay inside the hull of their inputs.
        const double alpha = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
        const auto smooth = exp_smooth(seq, alpha);
        const Grid& seed = r.seed.fitted;
        for (std::size_t i = 0; i < smooth.size(); ++i) {
            for (Eigen::Index j = 0; j < seed.size(); ++j) {
                double lo = seed.data()[j];
                double hi = seed.data()[j];
                for (std::size_t m = 2; m <= i + 2; ++m) {
                    lo = std::min(lo, seq.at(m).data()[j]);
                    hi = std::max(hi, seq.at(m).data()[j]);
                }
                CHECK(smooth[i].data()[j] >= lo - 1e-12);
                CHECK(smooth[i].data()[j] <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("optimize_alpha agrees with a dense search for random sequences") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Grid> g;
        for (int i = 0; i < 5; ++i) {
            g.push_back(random_grid(rng, 4, 5));
        }
        const double got = optimize_alpha(RiskSequence(g), 0.01, trial % 2 == 0 ? 1u : 3u);
        CHECK(std::abs(got - fo::dense_alpha(g, 0.001)) <= 0.01 + 1e-12);
        CHECK(alpha_objective(RiskSequence(g), got) == doctest::Approx(fo::objective(g, got)).epsilon(1e-12));
    }
}
