#include "windramp/timeutil.hpp"

#include <cstdio>
#include <cstdlib>

namespace windramp {

// Howard Hinnant's civil-date algorithms, valid across the proleptic
// Gregorian calendar.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

std::string format_iso8601(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t secs = t % 86400;
    if (secs < 0) {
        secs += 86400;
        days -= 1;
    }
    int year;
    unsigned month, day;
    civil_from_days(days, year, month, day);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", year, month, day,
                  static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                  static_cast<long long>(secs % 60));
    return buf;
}

namespace {

bool read_digits(const std::string& s, std::size_t& pos, int count, long& out) {
    long v = 0;
    for (int i = 0; i < count; ++i) {
        if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') return false;
        v = v * 10 + (s[pos] - '0');
        ++pos;
    }
    out = v;
    return true;
}

} // namespace

std::optional<Timestamp> parse_timestamp(const std::string& text, const std::string& format) {
    long year = 1970, mon = 1, day = 1, hour = 0, min = 0, sec = 0;
    std::size_t ti = 0;
    for (std::size_t fi = 0; fi < format.size(); ++fi) {
        if (format[fi] == '%' && fi + 1 < format.size()) {
            ++fi;
            bool ok = true;
            switch (format[fi]) {
                case 'Y': ok = read_digits(text, ti, 4, year); break;
                case 'm': ok = read_digits(text, ti, 2, mon); break;
                case 'd': ok = read_digits(text, ti, 2, day); break;
                case 'H': ok = read_digits(text, ti, 2, hour); break;
                case 'M': ok = read_digits(text, ti, 2, min); break;
                case 'S': ok = read_digits(text, ti, 2, sec); break;
                case '%':
                    ok = ti < text.size() && text[ti] == '%';
                    ++ti;
                    break;
                default: return std::nullopt; // unsupported token
            }
            if (!ok) return std::nullopt;
        } else {
            if (ti >= text.size() || text[ti] != format[fi]) return std::nullopt;
            ++ti;
        }
    }
    if (ti != text.size()) return std::nullopt;
    if (mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 || min > 59 || sec > 60)
        return std::nullopt;
    const std::int64_t days = days_from_civil(static_cast<int>(year), static_cast<unsigned>(mon),
                                              static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + min * 60 + sec;
}

std::optional<Timestamp> parse_iso8601(const std::string& text) {
    std::string t = text;
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.pop_back();
    if (t.size() > 10 && t[10] == 'T') t[10] = ' ';
    return parse_timestamp(t, "%Y-%m-%d %H:%M:%S");
}

} // namespace windramp
