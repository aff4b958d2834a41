#include "persua/date.hpp"

#include <array>
#include <cstdio>

#include "persua/error.hpp"

namespace persua {

namespace {

// days_from_civil / civil_from_days, the shift-epoch-to-March formulation.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::array<int, 3> civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int days_in_month(int y, int m) {
    static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && Date::is_leap_year(y)) return 29;
    return lengths[m - 1];
}

}  // namespace

bool Date::is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

std::int64_t Date::serial() const { return days_from_civil(year, month, day); }

Date Date::from_serial(std::int64_t days) {
    auto [y, m, d] = civil_from_days(days);
    return Date{y, m, d};
}

std::string Date::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse_iso(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw ParseError("expected YYYY-MM-DD date, got '" + s + "'");
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9')
            throw ParseError("expected YYYY-MM-DD date, got '" + s + "'");
    Date out;
    out.year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    out.month = (s[5] - '0') * 10 + (s[6] - '0');
    out.day = (s[8] - '0') * 10 + (s[9] - '0');
    if (out.month < 1 || out.month > 12)
        throw ParseError("month out of range in date '" + s + "'");
    if (out.day < 1 || out.day > days_in_month(out.year, out.month))
        throw ParseError("day out of range in date '" + s + "'");
    return out;
}

}  // namespace persua
