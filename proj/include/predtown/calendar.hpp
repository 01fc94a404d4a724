#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace predtown {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static constexpr int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return 0;
    if (m == 2 && is_leap_year(y)) return 29;
    return base[m - 1];
}

inline bool is_valid_date(const Date& d) {
    return d.year >= 1 && d.year <= 9999 && d.month >= 1 && d.month <= 12 &&
           d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

inline std::string to_iso(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

namespace detail {

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace detail

// Supported format names: "YYYY-MM-DD" (ISO-8601) and "DD/MM/YYYY".
inline std::optional<Date> parse_date_as(std::string_view s, std::string_view format) {
    Date d;
    if (format == "YYYY-MM-DD") {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        if (!detail::parse_digits(s, 0, 4, d.year) ||
            !detail::parse_digits(s, 5, 2, d.month) ||
            !detail::parse_digits(s, 8, 2, d.day))
            return std::nullopt;
    } else if (format == "DD/MM/YYYY") {
        if (s.size() != 10 || s[2] != '/' || s[5] != '/') return std::nullopt;
        if (!detail::parse_digits(s, 0, 2, d.day) ||
            !detail::parse_digits(s, 3, 2, d.month) ||
            !detail::parse_digits(s, 6, 4, d.year))
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (!is_valid_date(d)) return std::nullopt;
    return d;
}

inline std::optional<Date> parse_date(std::string_view s, const std::vector<std::string>& formats) {
    for (const auto& f : formats) {
        if (auto d = parse_date_as(s, f)) return d;
    }
    return std::nullopt;
}

struct YearMonth {
    int year = 0;
    int month = 0;

    auto operator<=>(const YearMonth&) const = default;

    YearMonth next() const {
        return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
    }

    // Months since year 0, for distances and iteration.
    int ordinal() const { return year * 12 + (month - 1); }

    static YearMonth from_ordinal(int ord) {
        int y = ord / 12;
        int m = ord % 12;
        if (m < 0) {
            m += 12;
            --y;
        }
        return {y, m + 1};
    }
};

inline YearMonth year_month(const Date& d) { return {d.year, d.month}; }

struct MonthWindow {
    YearMonth start;
    YearMonth end; // inclusive

    bool contains(const YearMonth& ym) const { return start <= ym && ym <= end; }
    int size() const { return end.ordinal() - start.ordinal() + 1; }
};

inline std::string to_string(const YearMonth& ym) {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
    return buf;
}

} // namespace predtown
