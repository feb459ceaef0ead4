#include "riskscan/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "riskscan/error.hpp"

namespace riskscan {

namespace {

bool parse_field(std::string_view text, int& out) {
    if (text.empty()) {
        return false;
    }
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

Date Date::parse(std::string_view text) {
    int y = 0;
    int m = 0;
    int d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_field(text.substr(0, 4), y) ||
        !parse_field(text.substr(5, 2), m) || !parse_field(text.substr(8, 2), d)) {
        throw InputError(fmt::format("unparsable date '{}' (expected YYYY-MM-DD)", text));
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw InputError(fmt::format("invalid calendar date '{}'", text));
    }
    return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

}  // namespace riskscan
