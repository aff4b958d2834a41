#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace persua {

// Calendar date (proleptic Gregorian). Day arithmetic goes through a civil-day
// serial number so date ranges and durations are exact.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;

    // Days since 1970-01-01 (negative before the epoch).
    std::int64_t serial() const;
    static Date from_serial(std::int64_t days);

    Date plus_days(std::int64_t n) const { return from_serial(serial() + n); }

    std::string to_iso() const;  // YYYY-MM-DD

    // Parses strict YYYY-MM-DD, validating month lengths and leap years.
    // Throws ParseError otherwise.
    static Date parse_iso(const std::string& s);

    static bool is_leap_year(int y);
};

// end - start in days; negative when end precedes start.
inline std::int64_t days_between(const Date& start, const Date& end) {
    return end.serial() - start.serial();
}

}  // namespace persua
