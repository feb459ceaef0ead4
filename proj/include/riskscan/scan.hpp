#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskscan/cases.hpp"
#include "riskscan/geo.hpp"
#include "riskscan/region.hpp"

namespace riskscan {

enum class Direction { high, low };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view text);

/// Poisson log likelihood ratio of a window against the uniform-risk null,
/// with total expected equal to total observed:
///
///   n ln(n / mu) + (N - n) ln((N - n) / (N - mu)),   0 ln 0 := 0
///
/// Returns 0 when the window does not deviate in `direction`
/// (n <= mu for high, n >= mu for low). Requires 0 <= n <= N and
/// 0 < mu < N; throws std::domain_error otherwise.
double log_likelihood_ratio(std::int64_t n, double mu, std::int64_t total, Direction direction);

/// Inside/outside rate ratio (n/mu) / ((N-n)/(N-mu)). When every case falls
/// inside the window the outside rate is zero; n/mu is returned instead so
/// the value stays finite.
double relative_risk(std::int64_t n, double mu, std::int64_t total);

/// A circular window: the first `size` entries of its center's neighbor order.
struct CandidateWindow {
    std::size_t center = 0;
    std::size_t size = 0;
    double radius_km = 0.0;
    /// radius_km widened by the equivalent-circle radius sqrt(area / pi) of
    /// each member, i.e. max over members of dist + sqrt(area / pi). Used for
    /// rasterising; equals radius_km when land areas are zero.
    double extent_km = 0.0;
    std::int64_t population = 0;
};

/// All candidate windows of a region under a population cap, plus the
/// bookkeeping needed to aggregate per-location values over them quickly.
///
/// Windows are the neighbor-order prefixes of every center whose population
/// stays within max_fraction * total_population. A center whose own
/// population already exceeds the cap contributes no window. A member set
/// reachable from several centers is kept once, from the center giving the
/// smallest radius (lowest center index on ties). Windows are stored sorted
/// by (center, size).
class WindowSet {
public:
    WindowSet(const StudyRegion& region, double max_fraction, unsigned workers = 1);

    const StudyRegion& region() const { return *region_; }
    const NeighborOrder& order() const { return order_; }
    const std::vector<CandidateWindow>& windows() const { return windows_; }
    std::size_t size() const { return windows_.size(); }
    double max_fraction() const { return max_fraction_; }

    /// Member indices of a window, ascending.
    std::vector<std::size_t> members(const CandidateWindow& w) const;

    /// out[w] = sum of values over the members of window w.
    void aggregate(std::span<const std::int64_t> values, std::span<std::int64_t> out) const;
    void aggregate(std::span<const double> values, std::span<double> out) const;

private:
    struct CenterGroup {
        std::size_t center = 0;
        std::size_t first_window = 0;
        std::size_t count = 0;
    };

    template <typename T>
    void aggregate_impl(std::span<const T> values, std::span<T> out) const;

    const StudyRegion* region_;
    double max_fraction_;
    NeighborOrder order_;
    std::vector<CandidateWindow> windows_;
    std::vector<CenterGroup> groups_;
};

/// Convenience wrapper returning just the window list.
std::vector<CandidateWindow> enumerate_windows(const StudyRegion& region, double max_fraction);

struct ScoredWindow {
    std::size_t window = 0;  // index into WindowSet::windows()
    std::int64_t observed = 0;
    double expected = 0.0;
    double llr = 0.0;
};

struct IntervalScan {
    Direction direction = Direction::high;
    double best_llr = 0.0;
    /// Sorted by llr descending; ties by center id, then by window size.
    std::vector<ScoredWindow> ranked;
};

IntervalScan scan_interval(const IntervalCounts& counts, const WindowSet& windows, Direction direction);

/// Maximum window LLR of each null replicate, for both directions.
struct NullMaxima {
    std::vector<double> high;
    std::vector<double> low;

    const std::vector<double>& of(Direction d) const { return d == Direction::high ? high : low; }
};

/// Replicate r redistributes the interval's N cases multinomially with
/// probabilities population_c / total_population, drawing from
/// StreamRng(seed, r). Output is independent of `workers`.
NullMaxima simulate_null_maxima(const IntervalCounts& counts, const WindowSet& windows, int replications,
                                std::uint64_t seed, unsigned workers = 1);

/// (1 + #{maxima >= llr}) / (1 + maxima.size()). `sorted_maxima` ascending.
double monte_carlo_pvalue(double llr, std::span<const double> sorted_maxima);

/// p-value for each entry of scan.ranked, in rank order.
std::vector<double> monte_carlo_pvalues(const IntervalScan& scan, const NullMaxima& maxima);
std::vector<double> monte_carlo_pvalues(const IntervalCounts& counts, const WindowSet& windows, Direction direction,
                                        int replications, std::uint64_t seed, unsigned workers = 1);

struct Cluster {
    CandidateWindow window;
    std::vector<std::size_t> members;
    std::int64_t observed = 0;
    double expected = 0.0;
    double llr = 0.0;
    double relative_risk = 1.0;
    double p_value = 1.0;
    Direction direction = Direction::high;
    int rank = 1;
};

/// Greedy sweep down the ranking: a window is accepted when its p-value is
/// below `significance` and it shares no location with an accepted cluster.
std::vector<Cluster> select_significant(const IntervalScan& scan, std::span<const double> pvalues,
                                        const WindowSet& windows, std::int64_t total_observed,
                                        double significance);

struct ScanOptions {
    int replications = 999;
    std::uint64_t seed = 0;
    double significance = 0.05;
    unsigned workers = 1;
};

struct ScanResult {
    IntervalSpec interval;
    std::int64_t total_observed = 0;
    double total_expected = 0.0;
    double max_fraction = 0.25;
    int replications = 999;
    std::uint64_t seed = 0;
    double significance = 0.05;
    std::vector<Cluster> high_clusters;
    std::vector<Cluster> low_clusters;
};

/// High- and low-rate scan of one interval with Monte Carlo inference.
/// Both directions share the same null replicates.
ScanResult scan(const IntervalCounts& counts, const WindowSet& windows, const ScanOptions& options);

}  // namespace riskscan
