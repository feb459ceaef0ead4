#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "riskscan/error.hpp"
#include "riskscan/scan.hpp"
#include "riskscan/scan_io.hpp"
#include "scan_oracle.hpp"
#include "test_support.hpp"

using namespace riskscan;
using riskscan::testing::make_region;
using riskscan::testing::Site;

namespace {

IntervalCounts counts_for(const StudyRegion& region, std::vector<std::int64_t> observed) {
    const IntervalSpec iv{1, Date::parse("2021-01-01"), Date::parse("2021-02-01")};
    return make_interval_counts(iv, std::move(observed), region);
}

// Observed data come from std::mt19937_64, never from the library's replicate
// streams, so the null test is not comparing a stream against itself.
std::vector<std::int64_t> draw_cases(const StudyRegion& region, std::int64_t total, const std::vector<double>& rr,
                                     std::mt19937_64& rng) {
    std::vector<double> w(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) {
        w[i] = static_cast<double>(region[i].population) * rr[i];
    }
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::vector<std::int64_t> out(region.size(), 0);
    for (std::int64_t k = 0; k < total; ++k) {
        ++out[pick(rng)];
    }
    return out;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("log_likelihood_ratio examples") {
    CHECK(log_likelihood_ratio(10, 10.0, 100, Direction::high) == 0.0);
    CHECK(log_likelihood_ratio(10, 10.0, 100, Direction::low) == 0.0);
    CHECK(std::abs(log_likelihood_ratio(20, 10.0, 100, Direction::high) - 4.4403) <= 1e-4);
    CHECK(log_likelihood_ratio(5, 10.0, 100, Direction::high) == 0.0);
    CHECK(log_likelihood_ratio(5, 10.0, 100, Direction::low) > 0.0);
    // 0 ln 0 conventions at both ends.
    CHECK(log_likelihood_ratio(0, 10.0, 100, Direction::low) == doctest::Approx(100 * std::log(100.0 / 90.0)));
    CHECK(log_likelihood_ratio(100, 10.0, 100, Direction::high) == doctest::Approx(100 * std::log(10.0)));
}

TEST_CASE("log_likelihood_ratio contract violations") {
    CHECK_THROWS_AS(log_likelihood_ratio(1, 0.0, 10, Direction::high), std::domain_error);
    CHECK_THROWS_AS(log_likelihood_ratio(1, 10.0, 10, Direction::high), std::domain_error);
    CHECK_THROWS_AS(log_likelihood_ratio(11, 5.0, 10, Direction::high), std::domain_error);
    CHECK_THROWS_AS(log_likelihood_ratio(-1, 5.0, 10, Direction::low), std::domain_error);
}

TEST_CASE("property: llr scales linearly with a common integer factor") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> total_d(2, 400);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t N = total_d(rng);
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(0, N)(rng);
        const double mu = std::uniform_real_distribution<double>(0.01, static_cast<double>(N) - 0.01)(rng);
        const std::int64_t a = std::uniform_int_distribution<std::int64_t>(2, 9)(rng);
        for (Direction d : {Direction::high, Direction::low}) {
            const double base = log_likelihood_ratio(n, mu, N, d);
            const double scaled = log_likelihood_ratio(a * n, static_cast<double>(a) * mu, a * N, d);
            CHECK(std::abs(scaled - static_cast<double>(a) * base) <= 1e-9 * std::max(1.0, scaled));
        }
    }
}

TEST_CASE("property: high llr strictly increases in n above mu") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 300; ++i) {
        const std::int64_t N = std::uniform_int_distribution<std::int64_t>(10, 2000)(rng);
        const double mu = std::uniform_real_distribution<double>(0.5, static_cast<double>(N) - 0.5)(rng);
        double prev = 0.0;
        for (std::int64_t n = static_cast<std::int64_t>(std::floor(mu)) + 1; n <= N; ++n) {
            const double v = log_likelihood_ratio(n, mu, N, Direction::high);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("enumerate_windows examples") {
    SUBCASE("equal populations at a quarter cap give singletons only") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 100}, {39, -95, 100}, {39, -94, 100}});
        const auto windows = enumerate_windows(region, 0.25);
        CHECK(windows.size() == 4);
        for (const auto& w : windows) {
            CHECK(w.size == 1);
            CHECK(w.radius_km == 0.0);
        }
    }
    SUBCASE("full cap reaches a window covering everything") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 250}, {39.5, -95, 80}, {39, -93, 10}});
        const WindowSet ws(region, 1.0);
        bool full = false;
        for (const auto& w : ws.windows()) {
            full = full || w.size == region.size();
        }
        CHECK(full);
        // Every center's whole neighbor order is under the cap; after dedup
        // the full set survives exactly once.
        CHECK(std::count_if(ws.windows().begin(), ws.windows().end(),
                            [&](const CandidateWindow& w) { return w.size == region.size(); }) == 1);
    }
}

TEST_CASE("enumerate_windows matches brute-force enumeration") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto region = riskscan::testing::random_region(rng, 8);
        const WindowSet ws(region, 0.5);
        const auto brute = oracle::all_windows(region, 0.5);
        std::map<std::set<std::size_t>, const oracle::Window*> want;
        for (const auto& w : brute) {
            want[w.members] = &w;
        }
        REQUIRE(ws.size() == want.size());
        for (const auto& w : ws.windows()) {
            const auto members = as_set(ws.members(w));
            auto it = want.find(members);
            REQUIRE(it != want.end());
            CHECK(std::abs(w.radius_km - it->second->radius) <= 1e-9);
            CHECK(w.population == it->second->population);
            CHECK(static_cast<double>(w.population) <= 0.5 * static_cast<double>(region.total_population()));
        }
    }
}

TEST_CASE("property: windows are neighbor-order prefixes of their center") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const auto region = riskscan::testing::random_region(rng, 15);
        const WindowSet ws(region, 0.3);
        for (const auto& w : ws.windows()) {
            const auto& ord = ws.order()[w.center];
            const std::set<std::size_t> prefix(ord.begin(), ord.begin() + static_cast<std::ptrdiff_t>(w.size));
            CHECK(prefix == as_set(ws.members(w)));
            CHECK(ord.front() == w.center);
        }
    }
}

TEST_CASE("scan_interval examples") {
    SUBCASE("counts exactly at expectation") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 100}, {39, -95, 100}, {39, -94, 100}});
        const WindowSet ws(region, 0.5);
        const auto counts = counts_for(region, {25, 25, 25, 25});
        CHECK(scan_interval(counts, ws, Direction::high).best_llr == 0.0);
        CHECK(scan_interval(counts, ws, Direction::low).best_llr == 0.0);
    }
    SUBCASE("doubled location wins among singletons") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 100}, {39, -95, 100}, {39, -94, 100}});
        const WindowSet ws(region, 0.25);
        const auto counts = counts_for(region, {20, 20, 40, 20});
        const auto s = scan_interval(counts, ws, Direction::high);
        CHECK(ws.windows()[s.ranked.front().window].center == 2);
        CHECK(s.ranked.front().observed == 40);
    }
}

TEST_CASE("scan_interval agrees with exhaustive recomputation") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto region = riskscan::testing::random_region(rng, 6);
        const std::int64_t N = std::uniform_int_distribution<std::int64_t>(5, 40)(rng);
        std::vector<double> rr(6, 1.0);
        rr[trial % 6] = 2.5;
        const auto observed = draw_cases(region, N, rr, rng);
        const double fraction = trial % 2 == 0 ? 0.5 : 1.0;
        const WindowSet ws(region, fraction);
        const auto counts = counts_for(region, observed);
        for (bool high : {true, false}) {
            const auto got = scan_interval(counts, ws, high ? Direction::high : Direction::low);
            const auto want = oracle::brute_scan(region, observed, fraction, high);
            REQUIRE(got.ranked.size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(std::abs(got.ranked[i].llr - want[i].llr) <= 1e-9);
            }
            // Equal scores can legitimately permute; compare membership only
            // where the ranking is strict.
            for (std::size_t i = 0; i < want.size(); ++i) {
                const bool strict = (i == 0 || want[i - 1].llr - want[i].llr > 1e-9) &&
                                    (i + 1 == want.size() || want[i].llr - want[i + 1].llr > 1e-9);
                if (strict) {
                    CHECK(as_set(ws.members(ws.windows()[got.ranked[i].window])) == want[i].members);
                }
            }
        }
    }
}

TEST_CASE("monte carlo p-value examples") {
    SUBCASE("rank formula") {
        std::vector<double> maxima(999);
        for (std::size_t i = 0; i < maxima.size(); ++i) {
            maxima[i] = static_cast<double>(i) * 0.01;
        }
        CHECK(monte_carlo_pvalue(100.0, maxima) == 1.0 / 1000.0);
        CHECK(monte_carlo_pvalue(0.0, maxima) == 1.0);
        CHECK(monte_carlo_pvalue(9.985, maxima) == 1.0 / 1000.0);
        CHECK(monte_carlo_pvalue(maxima[998], maxima) == 2.0 / 1000.0);  // ties count
        CHECK(monte_carlo_pvalue(maxima[989], maxima) == 11.0 / 1000.0);
    }
    SUBCASE("extreme observed data beats every replicate") {
        std::vector<Site> sites;
        for (int i = 0; i < 10; ++i) {
            sites.push_back({38.0 + i * 0.3, -95.0, 1000});
        }
        const auto region = make_region(sites);
        const WindowSet ws(region, 0.25);
        const auto counts = counts_for(region, {400, 60, 60, 60, 60, 60, 75, 75, 75, 75});
        const auto p = monte_carlo_pvalues(counts, ws, Direction::high, 999, 1);
        CHECK(p.front() == 1.0 / 1000.0);
    }
    SUBCASE("flat data gives p = 1") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 100}, {39, -95, 100}, {39, -94, 100}});
        const WindowSet ws(region, 0.5);
        const auto p = monte_carlo_pvalues(counts_for(region, {25, 25, 25, 25}), ws, Direction::high, 999, 9);
        CHECK(p.front() == 1.0);
    }
    SUBCASE("replications must be positive") {
        const auto region = make_region({{38, -95, 100}, {38, -94, 100}});
        const WindowSet ws(region, 0.5);
        CHECK_THROWS_AS(simulate_null_maxima(counts_for(region, {3, 4}), ws, 0, 1), InputError);
    }
}

TEST_CASE("null p-values are close to uniform") {
    // Reduced run (200 datasets, 199 replicates); the full-size check lives in
    // the acceptance suite. 0.115 is the 1% KS critical value for n = 200.
    std::mt19937_64 rng(2024);
    std::vector<Site> sites;
    for (int i = 0; i < 12; ++i) {
        sites.push_back({37.0 + (i / 4) * 0.8, -96.0 + (i % 4) * 0.9, 2000 + 500 * (i % 5)});
    }
    const auto region = make_region(sites);
    const WindowSet ws(region, 0.25);
    std::vector<double> pvalues;
    for (int run = 0; run < 200; ++run) {
        const auto observed = draw_cases(region, 150, std::vector<double>(region.size(), 1.0), rng);
        const auto p = monte_carlo_pvalues(counts_for(region, observed), ws, Direction::high, 199,
                                           1000 + static_cast<std::uint64_t>(run));
        pvalues.push_back(p.front());
    }
    CHECK(oracle::ks_uniform(pvalues) < 0.115);
}

TEST_CASE("select_significant examples") {
    const auto region = make_region({{38, -95, 100}, {38, -94.9, 100}, {38, -94.8, 100}, {40, -90, 100}});
    const WindowSet ws(region, 0.5);
    const auto counts = counts_for(region, {60, 55, 10, 25});

    SUBCASE("overlapping windows keep only the stronger") {
        const auto s = scan_interval(counts, ws, Direction::high);
        std::vector<double> p(s.ranked.size(), 0.001);
        const auto clusters = select_significant(s, p, ws, counts.total_observed, 0.05);
        REQUIRE(!clusters.empty());
        CHECK(clusters[0].rank == 1);
        CHECK(clusters[0].llr == s.best_llr);
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                std::vector<std::size_t> both;
                std::set_intersection(clusters[i].members.begin(), clusters[i].members.end(),
                                      clusters[j].members.begin(), clusters[j].members.end(),
                                      std::back_inserter(both));
                CHECK(both.empty());
            }
            CHECK(clusters[i].observed > clusters[i].expected);
            CHECK(clusters[i].relative_risk > 1.0);
        }
    }
    SUBCASE("nothing below the significance level") {
        const auto s = scan_interval(counts, ws, Direction::high);
        std::vector<double> p(s.ranked.size(), 0.05);
        CHECK(select_significant(s, p, ws, counts.total_observed, 0.05).empty());
    }
}

TEST_CASE("two planted disjoint hot spots come back as ranks 1 and 2") {
    // 4 x 5 lattice, equal populations; hot spots in opposite corners.
    std::vector<Site> sites;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 5; ++c) {
            sites.push_back({36.0 + r, -100.0 + c, 10000});
        }
    }
    const auto region = make_region(sites);
    const std::set<std::size_t> a{0, 1, 5};
    const std::set<std::size_t> b{14, 18, 19};
    std::vector<double> rr(region.size(), 1.0);
    for (auto i : a) {
        rr[i] = 3.0;
    }
    for (auto i : b) {
        rr[i] = 2.6;
    }
    const WindowSet ws(region, 0.25);
    std::mt19937_64 rng(99);
    const auto counts = counts_for(region, draw_cases(region, 3000, rr, rng));
    const auto result = scan(counts, ws, {999, 4, 0.05, 1});
    REQUIRE(result.high_clusters.size() >= 2);
    const auto first = as_set(result.high_clusters[0].members);
    const auto second = as_set(result.high_clusters[1].members);
    CHECK(first == a);
    CHECK(second == b);
    CHECK(result.high_clusters[0].p_value == 0.001);
    CHECK(result.high_clusters[1].p_value == 0.001);
}

TEST_CASE("property: reported clusters respect their invariants") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const auto region = riskscan::testing::random_region(rng, 25);
        std::vector<double> rr(region.size(), 1.0);
        for (std::size_t i = 0; i < region.size(); ++i) {
            rr[i] = std::uniform_real_distribution<double>(0.4, 2.2)(rng);
        }
        const WindowSet ws(region, 0.25);
        const auto counts = counts_for(region, draw_cases(region, 2000, rr, rng));
        const auto result = scan(counts, ws, {199, static_cast<std::uint64_t>(trial), 0.05, 1});
        for (const auto* list : {&result.high_clusters, &result.low_clusters}) {
            std::set<std::size_t> used;
            double prev = INFINITY;
            for (const auto& c : *list) {
                CHECK(c.p_value < 0.05);
                CHECK(c.p_value > 0.0);
                CHECK(c.llr <= prev);
                prev = c.llr;
                for (auto m : c.members) {
                    CHECK(used.insert(m).second);
                }
                if (c.direction == Direction::high) {
                    CHECK(c.observed > c.expected);
                    CHECK(c.relative_risk > 1.0);
                } else {
                    CHECK(c.observed < c.expected);
                    CHECK(c.relative_risk < 1.0);
                }
                const double N = static_cast<double>(counts.total_observed);
                const double n = static_cast<double>(c.observed);
                CHECK(c.relative_risk == doctest::Approx((n / c.expected) / ((N - n) / (N - c.expected))));
            }
        }
    }
}

TEST_CASE("same seed gives identical results for any worker count") {
    std::mt19937_64 rng(41);
    const auto region = riskscan::testing::random_region(rng, 30);
    std::vector<double> rr(region.size(), 1.0);
    rr[3] = rr[4] = 2.0;
    rr[20] = 0.4;
    const auto counts = counts_for(region, draw_cases(region, 4000, rr, rng));
    std::string reference;
    for (unsigned workers : {1u, 2u, 3u, 8u}) {
        const WindowSet ws(region, 0.25, workers);
        const auto result = scan(counts, ws, {299, 77, 0.05, workers});
        const std::string text = scan_result_to_json(result, region).dump(2);
        if (reference.empty()) {
            reference = text;
        } else {
            CHECK(text == reference);
        }
    }
    const WindowSet ws(region, 0.25);
    CHECK(simulate_null_maxima(counts, ws, 50, 5).high == simulate_null_maxima(counts, ws, 50, 5, 4).high);
    CHECK(simulate_null_maxima(counts, ws, 50, 5).high != simulate_null_maxima(counts, ws, 50, 6).high);
}

TEST_CASE("property: scan results round-trip through JSON") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 5; ++trial) {
        const auto region = riskscan::testing::random_region(rng, 20);
        std::vector<double> rr(region.size(), 1.0);
        rr[static_cast<std::size_t>(trial)] = 3.0;
        rr[19 - static_cast<std::size_t>(trial)] = 0.2;
        const WindowSet ws(region, 0.25);
        const auto counts = counts_for(region, draw_cases(region, 2500, rr, rng));
        const auto result = scan(counts, ws, {99, 3, 0.05, 1});
        const auto doc = scan_result_to_json(result, region);
        const auto back = scan_result_from_json(nlohmann::json::parse(doc.dump()), region);
        CHECK(scan_result_to_json(back, region).dump() == doc.dump());
        const auto csv = scan_result_to_csv(result, region);
        CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
              1 + result.high_clusters.size() + result.low_clusters.size());
    }
}
