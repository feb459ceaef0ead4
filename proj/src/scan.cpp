#include "riskscan/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "riskscan/error.hpp"
#include "riskscan/parallel.hpp"
#include "riskscan/rng.hpp"

namespace riskscan {

namespace {

// Unsigned Poisson LLR; callers guarantee 0 <= n <= N and 0 < mu < N.
inline double llr_value(double n, double mu, double total) {
    const double outside = total - n;
    double value = 0.0;
    if (n > 0.0) {
        value += n * std::log(n / mu);
    }
    if (outside > 0.0) {
        value += outside * std::log(outside / (total - mu));
    }
    // The expression is >= 0 by Gibbs' inequality; clip rounding noise.
    return std::max(value, 0.0);
}

// Windows holding nobody or everybody have no inside/outside contrast.
inline bool degenerate(const CandidateWindow& w, std::int64_t total_population, std::int64_t total_cases) {
    return w.population <= 0 || w.population >= total_population || total_cases <= 0;
}

struct SetKey {
    std::size_t size;
    std::uint64_t sum;
    std::uint64_t xor_;
    bool operator==(const SetKey&) const = default;
};

struct SetKeyHash {
    std::size_t operator()(const SetKey& k) const {
        return static_cast<std::size_t>(mix64(k.sum ^ mix64(k.xor_ ^ k.size)));
    }
};

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::high ? "high" : "low"; }

Direction direction_from_string(std::string_view text) {
    if (text == "high") {
        return Direction::high;
    }
    if (text == "low") {
        return Direction::low;
    }
    throw InputError(fmt::format("unknown cluster direction '{}'", text));
}

double log_likelihood_ratio(std::int64_t n, double mu, std::int64_t total, Direction direction) {
    if (n < 0 || n > total) {
        throw std::domain_error(fmt::format("log_likelihood_ratio: n_c = {} outside [0, {}]", n, total));
    }
    if (!(mu > 0.0) || !(mu < static_cast<double>(total))) {
        throw std::domain_error(fmt::format("log_likelihood_ratio: mu_c = {} outside (0, {})", mu, total));
    }
    const double nd = static_cast<double>(n);
    const bool deviates = direction == Direction::high ? nd > mu : nd < mu;
    return deviates ? llr_value(nd, mu, static_cast<double>(total)) : 0.0;
}

double relative_risk(std::int64_t n, double mu, std::int64_t total) {
    const double nd = static_cast<double>(n);
    const double outside = static_cast<double>(total - n);
    if (outside <= 0.0) {
        return nd / mu;
    }
    return (nd / mu) / (outside / (static_cast<double>(total) - mu));
}

WindowSet::WindowSet(const StudyRegion& region, double max_fraction, unsigned workers)
    : region_(&region), max_fraction_(max_fraction) {
    if (!(max_fraction > 0.0 && max_fraction <= 1.0)) {
        throw InputError(fmt::format("max_fraction must be in (0, 1], got {}", max_fraction));
    }
    order_ = neighbor_order(region, workers);

    const double cap = max_fraction * static_cast<double>(region.total_population()) * (1.0 + 1e-12);
    std::vector<CandidateWindow> all;
    std::vector<char> alive;
    std::unordered_map<SetKey, std::vector<std::size_t>, SetKeyHash> seen;

    auto same_members = [&](const CandidateWindow& a, const CandidateWindow& b) {
        return members(a) == members(b);
    };

    for (std::size_t c = 0; c < region.size(); ++c) {
        const auto& row = order_[c];
        const LatLon origin = region[c].position;
        SetKey key{0, 0, 0};
        std::int64_t pop = 0;
        double extent = 0.0;
        for (std::size_t s = 1; s <= row.size(); ++s) {
            const std::size_t m = row[s - 1];
            pop += region[m].population;
            if (static_cast<double>(pop) > cap) {
                break;
            }
            const double dist = m == c ? 0.0 : haversine_km(origin, region[m].position);
            extent = std::max(extent, dist + std::sqrt(region[m].land_area_km2 / std::numbers::pi));
            key.size = s;
            key.sum += mix64(m + 1);
            key.xor_ ^= mix64(~static_cast<std::uint64_t>(m));

            CandidateWindow w{c, s, dist, extent, pop};
            auto& bucket = seen[key];
            bool duplicate = false;
            for (std::size_t& idx : bucket) {
                if (alive[idx] && same_members(all[idx], w)) {
                    duplicate = true;
                    if (w.radius_km < all[idx].radius_km) {
                        alive[idx] = 0;
                        idx = all.size();
                        all.push_back(w);
                        alive.push_back(1);
                    }
                    break;
                }
            }
            if (!duplicate) {
                bucket.push_back(all.size());
                all.push_back(w);
                alive.push_back(1);
            }
        }
    }

    for (std::size_t i = 0; i < all.size(); ++i) {
        if (alive[i]) {
            windows_.push_back(all[i]);
        }
    }
    std::sort(windows_.begin(), windows_.end(), [](const CandidateWindow& a, const CandidateWindow& b) {
        return a.center != b.center ? a.center < b.center : a.size < b.size;
    });
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        if (groups_.empty() || groups_.back().center != windows_[i].center) {
            groups_.push_back({windows_[i].center, i, 0});
        }
        ++groups_.back().count;
    }
}

std::vector<std::size_t> WindowSet::members(const CandidateWindow& w) const {
    const auto& row = order_[w.center];
    std::vector<std::size_t> out(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(w.size));
    std::sort(out.begin(), out.end());
    return out;
}

template <typename T>
void WindowSet::aggregate_impl(std::span<const T> values, std::span<T> out) const {
    for (const CenterGroup& g : groups_) {
        const auto& row = order_[g.center];
        T running{};
        std::size_t filled = 0;
        for (std::size_t k = 0; k < g.count; ++k) {
            const CandidateWindow& w = windows_[g.first_window + k];
            for (; filled < w.size; ++filled) {
                running += values[row[filled]];
            }
            out[g.first_window + k] = running;
        }
    }
}

void WindowSet::aggregate(std::span<const std::int64_t> values, std::span<std::int64_t> out) const {
    aggregate_impl(values, out);
}

void WindowSet::aggregate(std::span<const double> values, std::span<double> out) const {
    aggregate_impl(values, out);
}

std::vector<CandidateWindow> enumerate_windows(const StudyRegion& region, double max_fraction) {
    return WindowSet(region, max_fraction).windows();
}

IntervalScan scan_interval(const IntervalCounts& counts, const WindowSet& windows, Direction direction) {
    const StudyRegion& region = windows.region();
    if (counts.observed.size() != region.size() || counts.expected.size() != region.size()) {
        throw std::invalid_argument("scan_interval: counts and windows refer to different regions");
    }
    const auto& ws = windows.windows();
    std::vector<std::int64_t> n(ws.size());
    std::vector<double> mu(ws.size());
    windows.aggregate(std::span<const std::int64_t>(counts.observed), std::span<std::int64_t>(n));
    windows.aggregate(std::span<const double>(counts.expected), std::span<double>(mu));

    IntervalScan out;
    out.direction = direction;
    out.ranked.resize(ws.size());
    for (std::size_t w = 0; w < ws.size(); ++w) {
        double llr = 0.0;
        if (!degenerate(ws[w], region.total_population(), counts.total_observed)) {
            llr = log_likelihood_ratio(n[w], mu[w], counts.total_observed, direction);
        }
        out.ranked[w] = {w, n[w], mu[w], llr};
    }
    std::sort(out.ranked.begin(), out.ranked.end(), [&](const ScoredWindow& a, const ScoredWindow& b) {
        if (a.llr != b.llr) {
            return a.llr > b.llr;
        }
        const CandidateWindow& wa = ws[a.window];
        const CandidateWindow& wb = ws[b.window];
        if (wa.center != wb.center) {
            return region[wa.center].id < region[wb.center].id;
        }
        return wa.size < wb.size;
    });
    out.best_llr = out.ranked.empty() ? 0.0 : out.ranked.front().llr;
    return out;
}

NullMaxima simulate_null_maxima(const IntervalCounts& counts, const WindowSet& windows, int replications,
                                std::uint64_t seed, unsigned workers) {
    if (replications < 1) {
        throw InputError(fmt::format("replications must be >= 1, got {}", replications));
    }
    const StudyRegion& region = windows.region();
    const auto& ws = windows.windows();
    const std::size_t reps = static_cast<std::size_t>(replications);

    std::vector<double> weights(region.size());
    for (std::size_t c = 0; c < region.size(); ++c) {
        weights[c] = static_cast<double>(region[c].population);
    }
    std::vector<double> mu(ws.size());
    windows.aggregate(std::span<const double>(counts.expected), std::span<double>(mu));
    std::vector<char> usable(ws.size());
    for (std::size_t w = 0; w < ws.size(); ++w) {
        usable[w] = !degenerate(ws[w], region.total_population(), counts.total_observed);
    }

    const std::int64_t total = counts.total_observed;
    const double total_d = static_cast<double>(total);
    NullMaxima out;
    out.high.assign(reps, 0.0);
    out.low.assign(reps, 0.0);
    parallel_for(reps, workers, [&](std::size_t r) {
        StreamRng rng(seed, r);
        std::vector<std::int64_t> cases(region.size());
        std::vector<std::int64_t> n(ws.size());
        multinomial(total, weights, std::span<std::int64_t>(cases), rng);
        windows.aggregate(std::span<const std::int64_t>(cases), std::span<std::int64_t>(n));
        double best_high = 0.0;
        double best_low = 0.0;
        for (std::size_t w = 0; w < ws.size(); ++w) {
            if (!usable[w]) {
                continue;
            }
            const double nd = static_cast<double>(n[w]);
            if (nd > mu[w]) {
                best_high = std::max(best_high, llr_value(nd, mu[w], total_d));
            } else if (nd < mu[w]) {
                best_low = std::max(best_low, llr_value(nd, mu[w], total_d));
            }
        }
        out.high[r] = best_high;
        out.low[r] = best_low;
    });
    return out;
}

double monte_carlo_pvalue(double llr, std::span<const double> sorted_maxima) {
    const auto first_ge = std::lower_bound(sorted_maxima.begin(), sorted_maxima.end(), llr);
    const auto at_least = static_cast<double>(sorted_maxima.end() - first_ge);
    return (1.0 + at_least) / (1.0 + static_cast<double>(sorted_maxima.size()));
}

std::vector<double> monte_carlo_pvalues(const IntervalScan& scan, const NullMaxima& maxima) {
    std::vector<double> sorted = maxima.of(scan.direction);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> p(scan.ranked.size());
    for (std::size_t i = 0; i < scan.ranked.size(); ++i) {
        p[i] = monte_carlo_pvalue(scan.ranked[i].llr, sorted);
    }
    return p;
}

std::vector<double> monte_carlo_pvalues(const IntervalCounts& counts, const WindowSet& windows, Direction direction,
                                        int replications, std::uint64_t seed, unsigned workers) {
    const IntervalScan scanned = scan_interval(counts, windows, direction);
    return monte_carlo_pvalues(scanned, simulate_null_maxima(counts, windows, replications, seed, workers));
}

std::vector<Cluster> select_significant(const IntervalScan& scan, std::span<const double> pvalues,
                                        const WindowSet& windows, std::int64_t total_observed,
                                        double significance) {
    if (pvalues.size() != scan.ranked.size()) {
        throw std::invalid_argument("select_significant: one p-value per ranked window required");
    }
    std::vector<char> taken(windows.region().size(), 0);
    std::vector<Cluster> out;
    for (std::size_t i = 0; i < scan.ranked.size(); ++i) {
        if (!(pvalues[i] < significance)) {
            continue;
        }
        const ScoredWindow& sw = scan.ranked[i];
        if (sw.llr <= 0.0) {
            continue;
        }
        const CandidateWindow& w = windows.windows()[sw.window];
        auto members = windows.members(w);
        if (std::any_of(members.begin(), members.end(), [&](std::size_t m) { return taken[m] != 0; })) {
            continue;
        }
        for (std::size_t m : members) {
            taken[m] = 1;
        }
        Cluster c;
        c.window = w;
        c.members = std::move(members);
        c.observed = sw.observed;
        c.expected = sw.expected;
        c.llr = sw.llr;
        c.relative_risk = relative_risk(sw.observed, sw.expected, total_observed);
        c.p_value = pvalues[i];
        c.direction = scan.direction;
        c.rank = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(c));
    }
    return out;
}

ScanResult scan(const IntervalCounts& counts, const WindowSet& windows, const ScanOptions& options) {
    if (!(options.significance > 0.0 && options.significance <= 1.0)) {
        throw InputError(fmt::format("significance must be in (0, 1], got {}", options.significance));
    }
    const NullMaxima maxima =
        simulate_null_maxima(counts, windows, options.replications, options.seed, options.workers);

    ScanResult result;
    result.interval = counts.interval;
    result.total_observed = counts.total_observed;
    result.total_expected = counts.total_expected;
    result.max_fraction = windows.max_fraction();
    result.replications = options.replications;
    result.seed = options.seed;
    result.significance = options.significance;
    for (Direction d : {Direction::high, Direction::low}) {
        const IntervalScan scanned = scan_interval(counts, windows, d);
        const auto p = monte_carlo_pvalues(scanned, maxima);
        auto clusters = select_significant(scanned, p, windows, counts.total_observed, options.significance);
        (d == Direction::high ? result.high_clusters : result.low_clusters) = std::move(clusters);
    }
    return result;
}

}  // namespace riskscan
