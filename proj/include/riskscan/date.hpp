#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace riskscan {

/// Calendar date at day resolution.
class Date {
public:
    constexpr Date() = default;
    explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}

    /// Parses `YYYY-MM-DD`. Throws InputError on anything else, including
    /// dates that do not exist in the Gregorian calendar.
    static Date parse(std::string_view text);

    std::string iso() const;
    constexpr std::chrono::sys_days days() const { return days_; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace riskscan
