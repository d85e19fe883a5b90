#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "epswap/errors.hpp"

namespace epswap {

// Calendar day. No calendar arithmetic is needed anywhere (trailing windows
// are positional), so this is an ordered triple with parsing and formatting.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    // Accepts ISO-8601 (2022-02-02) and the slash form (2022/02/17).
    static Date parse(std::string_view text);

    std::string iso() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }
};

namespace detail {

inline int parse_int_field(std::string_view text, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError(std::string("invalid ") + what + " in date");
    return value;
}

}  // namespace detail

inline Date Date::parse(std::string_view text) {
    const char sep = text.find('/') != std::string_view::npos ? '/' : '-';
    const auto first = text.find(sep);
    const auto second = text.find(sep, first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos)
        throw DataError("invalid date '" + std::string(text) + "'");
    Date d;
    d.year = detail::parse_int_field(text.substr(0, first), "year");
    d.month = detail::parse_int_field(text.substr(first + 1, second - first - 1), "month");
    d.day = detail::parse_int_field(text.substr(second + 1), "day");
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
        throw DataError("date out of range '" + std::string(text) + "'");
    return d;
}

}  // namespace epswap
