#include "taoquant/dates.hpp"

#include <array>
#include <charconv>

#include "taoquant/errors.hpp"

namespace taoquant {

namespace {

// Howard Hinnant's proleptic-Gregorian algorithms.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t y;
    unsigned m;
    unsigned d;
};

constexpr Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

constexpr bool is_leap(std::int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
    constexpr std::array<unsigned, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : lengths[m - 1];
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) : days_(days_from_civil(year, month, day)) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day));
}

Date Date::parse(std::string_view iso) {
    const auto fail = [iso] { throw ParseError("expected YYYY-MM-DD, got '" + std::string(iso) + "'"); };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') fail();
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const char* p = iso.data();
    auto r = std::from_chars(p, p + 4, y);
    if (r.ec != std::errc{} || r.ptr != p + 4) fail();
    r = std::from_chars(p + 5, p + 7, m);
    if (r.ec != std::errc{} || r.ptr != p + 7) fail();
    r = std::from_chars(p + 8, p + 10, d);
    if (r.ec != std::errc{} || r.ptr != p + 10) fail();
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) fail();
    return Date(days_from_civil(y, m, d));
}

std::string Date::to_string() const {
    const Civil c = civil_from_days(days_);
    char buf[11];
    auto put2 = [](char* out, unsigned v) {
        out[0] = static_cast<char>('0' + v / 10);
        out[1] = static_cast<char>('0' + v % 10);
    };
    const auto y = c.y;
    buf[0] = static_cast<char>('0' + (y / 1000) % 10);
    buf[1] = static_cast<char>('0' + (y / 100) % 10);
    buf[2] = static_cast<char>('0' + (y / 10) % 10);
    buf[3] = static_cast<char>('0' + y % 10);
    buf[4] = '-';
    put2(buf + 5, c.m);
    buf[7] = '-';
    put2(buf + 8, c.d);
    return std::string(buf, 10);
}

int Date::year() const { return static_cast<int>(civil_from_days(days_).y); }
unsigned Date::month() const { return civil_from_days(days_).m; }
unsigned Date::day() const { return civil_from_days(days_).d; }

}  // namespace taoquant
