#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace taoquant {

/// Calendar date stored as days since 1970-01-01. Cheap to copy and order;
/// daily panel indices are plain day differences.
class Date {
  public:
    Date() = default;
    constexpr explicit Date(std::int64_t days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses strict "YYYY-MM-DD". Throws ParseError on anything else.
    static Date parse(std::string_view iso);

    [[nodiscard]] constexpr std::int64_t days_since_epoch() const { return days_; }
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] int year() const;
    [[nodiscard]] unsigned month() const;
    [[nodiscard]] unsigned day() const;

    friend constexpr Date operator+(Date d, std::int64_t n) { return Date(d.days_ + n); }
    friend constexpr Date operator-(Date d, std::int64_t n) { return Date(d.days_ - n); }
    friend constexpr std::int64_t operator-(Date a, Date b) { return a.days_ - b.days_; }
    Date& operator+=(std::int64_t n) {
        days_ += n;
        return *this;
    }
    Date& operator++() {
        ++days_;
        return *this;
    }
    friend constexpr auto operator<=>(Date, Date) = default;

  private:
    std::int64_t days_ = 0;
};

}  // namespace taoquant
