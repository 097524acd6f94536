#pragma once
// UTC timestamps with seconds precision, serialized as RFC 3339.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace causeway {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

inline bool all_digits(const std::string& s, size_t from, size_t count) {
    if (from + count > s.size()) return false;
    for (size_t i = from; i < from + count; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline int to_int(const std::string& s, size_t from, size_t count) {
    int v = 0;
    for (size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

}  // namespace detail

inline std::string format_rfc3339(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y;
    unsigned m, d;
    detail::civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by 'Z', an offset (+HH:MM / -HH:MM),
// or an optional fractional part before either. Fractional seconds truncate.
inline std::optional<Timestamp> parse_rfc3339(const std::string& s) {
    using namespace detail;
    if (s.size() < 20) return std::nullopt;
    if (!all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 2) || s[7] != '-' ||
        !all_digits(s, 8, 2))
        return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!all_digits(s, 11, 2) || s[13] != ':' || !all_digits(s, 14, 2) || s[16] != ':' ||
        !all_digits(s, 17, 2))
        return std::nullopt;

    const int year = to_int(s, 0, 4);
    const int month = to_int(s, 5, 2);
    const int day = to_int(s, 8, 2);
    const int hour = to_int(s, 11, 2);
    const int minute = to_int(s, 14, 2);
    const int second = to_int(s, 17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        return std::nullopt;

    size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos >= s.size()) return std::nullopt;

    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        if (pos + 1 != s.size()) return std::nullopt;
    } else if (s[pos] == '+' || s[pos] == '-') {
        if (!all_digits(s, pos + 1, 2) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !all_digits(s, pos + 4, 2) || pos + 6 != s.size())
            return std::nullopt;
        offset = to_int(s, pos + 1, 2) * 3600 + to_int(s, pos + 4, 2) * 60;
        if (s[pos] == '-') offset = -offset;
    } else {
        return std::nullopt;
    }

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

}  // namespace causeway
