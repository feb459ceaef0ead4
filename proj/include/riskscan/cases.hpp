#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "riskscan/date.hpp"
#include "riskscan/region.hpp"

namespace riskscan {

/// Half-open date range [start, end) with a 1-based index.
struct IntervalSpec {
    int index = 1;
    Date start;
    Date end;
};

/// Builds abutting intervals from an ascending list of boundary dates
/// (n + 1 boundaries yield n intervals). Throws InputError unless the
/// boundaries are strictly increasing and there are at least two.
std::vector<IntervalSpec> intervals_from_boundaries(const std::vector<Date>& boundaries);

/// Checks the IntervalSpec invariants on a list: start < end, consecutive
/// intervals abut, indices 1..n. Throws InputError.
void validate_intervals(const std::vector<IntervalSpec>& intervals);

struct CumulativePoint {
    Date date;
    std::int64_t cumulative = 0;
};

/// Cumulative case counts per location, each series sorted by date.
/// Indexed like the StudyRegion it was loaded against.
struct CaseSeries {
    std::vector<std::vector<CumulativePoint>> by_location;

    /// Last cumulative value strictly before `date`, 0 if none.
    std::int64_t cumulative_before(std::size_t location, Date date) const;
};

/// Reads `date,id,cases` rows where `cases` is cumulative to date.
/// Unknown ids are rejected; rows may come in any order.
CaseSeries load_cases(const std::string& path, const StudyRegion& region);

/// Observed and uniform-risk expected counts for one interval.
struct IntervalCounts {
    IntervalSpec interval;
    std::vector<std::int64_t> observed;
    std::vector<double> expected;
    std::int64_t total_observed = 0;
    double total_expected = 0.0;
    /// Locations whose cumulative series decreased across the interval
    /// and were clamped to 0 new cases.
    std::size_t clamped = 0;
};

/// Expected counts under uniform risk: N * population_c / total_population.
IntervalCounts make_interval_counts(const IntervalSpec& interval, std::vector<std::int64_t> observed,
                                    const StudyRegion& region);

/// Converts cumulative series to per-interval incident counts.
std::vector<IntervalCounts> slice_intervals(const CaseSeries& series, const std::vector<IntervalSpec>& intervals,
                                            const StudyRegion& region);

}  // namespace riskscan
