#include "riskscan/cases.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "csv_reader.hpp"
#include "riskscan/error.hpp"

namespace riskscan {

std::vector<IntervalSpec> intervals_from_boundaries(const std::vector<Date>& boundaries) {
    if (boundaries.size() < 2) {
        throw InputError("need at least two interval boundaries");
    }
    std::vector<IntervalSpec> out;
    out.reserve(boundaries.size() - 1);
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        out.push_back({static_cast<int>(i + 1), boundaries[i], boundaries[i + 1]});
    }
    validate_intervals(out);
    return out;
}

void validate_intervals(const std::vector<IntervalSpec>& intervals) {
    if (intervals.empty()) {
        throw InputError("empty interval list");
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const IntervalSpec& iv = intervals[i];
        if (iv.index != static_cast<int>(i + 1)) {
            throw InputError(fmt::format("interval {} has index {}", i + 1, iv.index));
        }
        if (!(iv.start < iv.end)) {
            throw InputError(fmt::format("interval {}: start {} is not before end {}", iv.index, iv.start.iso(),
                                         iv.end.iso()));
        }
        if (i > 0 && intervals[i - 1].end != iv.start) {
            throw InputError(fmt::format("interval {} starts {} but interval {} ends {}", iv.index, iv.start.iso(),
                                         intervals[i - 1].index, intervals[i - 1].end.iso()));
        }
    }
}

std::int64_t CaseSeries::cumulative_before(std::size_t location, Date date) const {
    const auto& series = by_location[location];
    auto it = std::lower_bound(series.begin(), series.end(), date,
                               [](const CumulativePoint& p, Date d) { return p.date < d; });
    return it == series.begin() ? 0 : std::prev(it)->cumulative;
}

CaseSeries load_cases(const std::string& path, const StudyRegion& region) {
    detail::CsvReader reader(path);
    reader.expect_header("date,id,cases");

    CaseSeries out;
    out.by_location.resize(region.size());
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 3) {
            reader.fail(fmt::format("expected 3 fields, got {}", fields.size()));
        }
        Date date;
        try {
            date = Date::parse(fields[0]);
        } catch (const InputError& e) {
            reader.fail(e.what());
        }
        const auto idx = region.index_of(fields[1]);
        if (!idx) {
            reader.fail(fmt::format("unknown location id '{}'", fields[1]));
        }
        std::int64_t cases = 0;
        const auto& f = fields[2];
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), cases);
        if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || cases < 0) {
            reader.fail(fmt::format("cannot parse case count '{}'", f));
        }
        out.by_location[*idx].push_back({date, cases});
    }

    for (std::size_t i = 0; i < out.by_location.size(); ++i) {
        auto& series = out.by_location[i];
        std::stable_sort(series.begin(), series.end(),
                         [](const CumulativePoint& a, const CumulativePoint& b) { return a.date < b.date; });
        auto dup = std::adjacent_find(series.begin(), series.end(),
                                      [](const CumulativePoint& a, const CumulativePoint& b) { return a.date == b.date; });
        if (dup != series.end()) {
            throw InputError(fmt::format("{}: location '{}' has two rows for {}", path, region[i].id, dup->date.iso()));
        }
    }
    return out;
}

IntervalCounts make_interval_counts(const IntervalSpec& interval, std::vector<std::int64_t> observed,
                                    const StudyRegion& region) {
    if (observed.size() != region.size()) {
        throw std::invalid_argument("observed counts do not match region size");
    }
    if (region.total_population() <= 0) {
        throw InputError("study region has zero total population; expected counts undefined");
    }
    IntervalCounts counts;
    counts.interval = interval;
    counts.observed = std::move(observed);
    for (auto n : counts.observed) {
        counts.total_observed += n;
    }
    const double total = static_cast<double>(counts.total_observed);
    const double pop_total = static_cast<double>(region.total_population());
    counts.expected.resize(region.size());
    for (std::size_t c = 0; c < region.size(); ++c) {
        counts.expected[c] = total * static_cast<double>(region[c].population) / pop_total;
        counts.total_expected += counts.expected[c];
    }
    return counts;
}

std::vector<IntervalCounts> slice_intervals(const CaseSeries& series, const std::vector<IntervalSpec>& intervals,
                                            const StudyRegion& region) {
    validate_intervals(intervals);
    if (series.by_location.size() != region.size()) {
        throw std::invalid_argument("case series was loaded against a different region");
    }
    std::vector<IntervalCounts> out;
    out.reserve(intervals.size());
    for (const IntervalSpec& iv : intervals) {
        std::vector<std::int64_t> observed(region.size(), 0);
        std::size_t clamped = 0;
        for (std::size_t c = 0; c < region.size(); ++c) {
            const std::int64_t diff = series.cumulative_before(c, iv.end) - series.cumulative_before(c, iv.start);
            if (diff < 0) {
                ++clamped;
            } else {
                observed[c] = diff;
            }
        }
        if (clamped > 0) {
            spdlog::warn("interval {}: clamped {} decreasing cumulative series to 0 new cases", iv.index, clamped);
        }
        auto counts = make_interval_counts(iv, std::move(observed), region);
        counts.clamped = clamped;
        out.push_back(std::move(counts));
    }
    return out;
}

}  // namespace riskscan
