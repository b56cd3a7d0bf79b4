#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hlppl {

/// Calendar date stored as days since 1970-01-01. Files carry ISO-8601 strings.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    /// Parses YYYY-MM-DD. Throws Error(parse) on anything else.
    static Date parse(std::string_view iso);
    static Date from_ymd(int year, unsigned month, unsigned day);

    constexpr std::int32_t days() const noexcept { return days_; }
    std::string iso() const;
    /// 0 = Sunday ... 6 = Saturday
    unsigned weekday() const noexcept;

    constexpr Date operator+(std::int32_t n) const noexcept { return Date(days_ + n); }
    constexpr std::int32_t operator-(Date other) const noexcept { return days_ - other.days_; }
    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

}  // namespace hlppl
