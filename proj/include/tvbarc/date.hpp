#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tvbarc/errors.hpp"

namespace tvbarc {

// Calendar dates are plain day counts since the Unix epoch; all arithmetic
// goes through std::chrono's proleptic Gregorian calendar.
using Date = std::chrono::sys_days;

inline Date make_date(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                       std::chrono::day{day}};
    if (!ymd.ok()) throw data_error("invalid calendar date");
    return sys_days{ymd};
}

inline std::string format_date(Date d) {
    using namespace std::chrono;
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

namespace detail {

inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                             unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

/// Strict ISO-8601 date (YYYY-MM-DD). Returns nullopt on any deviation,
/// including calendar-invalid dates such as 2020-02-30.
inline std::optional<Date> parse_date(std::string_view s) {
    using namespace std::chrono;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    unsigned y, m, d;
    if (!detail::parse_fixed_uint(s, 0, 4, y) || !detail::parse_fixed_uint(s, 5, 2, m) ||
        !detail::parse_fixed_uint(s, 8, 2, d))
        return std::nullopt;
    year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                       std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

/// ISO-8601 date-time normalized to a UTC calendar date. Accepts a bare date,
/// or date plus time separated by 'T' or ' ', with optional fractional seconds
/// and optional zone suffix (Z, +HH:MM, -HHMM, ...). A missing zone is read as
/// UTC. Returns nullopt for anything malformed.
inline std::optional<Date> parse_timestamp_utc(std::string_view s) {
    using namespace std::chrono;
    // Trim surrounding whitespace.
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.size() < 10) return std::nullopt;

    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    if (s.size() == 10) return date;

    char sep = s[10];
    if (sep != 'T' && sep != ' ') return std::nullopt;
    std::string_view rest = s.substr(11);

    unsigned hh, mm, ss = 0;
    if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
    if (!detail::parse_fixed_uint(rest, 0, 2, hh) || !detail::parse_fixed_uint(rest, 3, 2, mm))
        return std::nullopt;
    std::size_t pos = 5;
    if (pos < rest.size() && rest[pos] == ':') {
        if (!detail::parse_fixed_uint(rest, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    // Fractional seconds do not move the date; skip them.
    if (pos < rest.size() && rest[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < rest.size() && rest[pos] >= '0' && rest[pos] <= '9') ++pos, ++digits;
        if (digits == 0) return std::nullopt;
    }

    long offset_minutes = 0;
    if (pos < rest.size()) {
        char z = rest[pos];
        if (z == 'Z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            unsigned oh, om = 0;
            if (!detail::parse_fixed_uint(rest, pos + 1, 2, oh)) return std::nullopt;
            std::size_t opos = pos + 3;
            if (opos < rest.size() && rest[opos] == ':') ++opos;
            if (opos < rest.size()) {
                if (!detail::parse_fixed_uint(rest, opos, 2, om)) return std::nullopt;
                opos += 2;
            }
            if (oh > 23 || om > 59) return std::nullopt;
            offset_minutes = static_cast<long>(oh) * 60 + static_cast<long>(om);
            if (z == '-') offset_minutes = -offset_minutes;
            pos = opos;
        } else {
            return std::nullopt;
        }
    }
    if (pos != rest.size()) return std::nullopt;

    sys_seconds local{sys_days{*date} + hours{hh} + minutes{mm} + seconds{ss}};
    sys_seconds utc = local - minutes{offset_minutes};
    return floor<days>(utc);
}

}  // namespace tvbarc
