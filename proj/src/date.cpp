#include "hlppl/date.hpp"

#include <chrono>
#include <cstdio>

#include "hlppl/error.hpp"

namespace hlppl {

namespace {

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return !s.empty();
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        fail(ErrorKind::parse, "invalid calendar date " + std::to_string(year) + "-" +
                                   std::to_string(month) + "-" + std::to_string(day));
    }
    return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !all_digits(iso.substr(0, 4)) ||
        !all_digits(iso.substr(5, 2)) || !all_digits(iso.substr(8, 2))) {
        fail(ErrorKind::parse, "expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    return from_ymd(to_int(iso.substr(0, 4)), static_cast<unsigned>(to_int(iso.substr(5, 2))),
                    static_cast<unsigned>(to_int(iso.substr(8, 2))));
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

unsigned Date::weekday() const noexcept {
    return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{days_}}}.c_encoding();
}

}  // namespace hlppl
