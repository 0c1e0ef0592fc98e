#include "loadgen/data/time.hpp"

#include <charconv>
#include <cstdio>

namespace loadgen::data {

using namespace std::chrono;

namespace {

UtcSeconds last_sunday_0100(int y, month m) {
    const sys_days d{year{y} / m / Sunday[last]};
    return UtcSeconds{d} + hours{1};
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && ptr == s.data() + pos + len;
}

}  // namespace

UtcSeconds eu_summer_time_start(int y) { return last_sunday_0100(y, March); }
UtcSeconds eu_summer_time_end(int y) { return last_sunday_0100(y, October); }

bool is_eu_summer_time(UtcSeconds ts) {
    const int y = static_cast<int>(year_month_day{floor<days>(ts)}.year());
    return ts >= eu_summer_time_start(y) && ts < eu_summer_time_end(y);
}

LocalSeconds utc_to_local(UtcSeconds ts) {
    const auto offset = is_eu_summer_time(ts) ? hours{2} : hours{1};
    return LocalSeconds{ts.time_since_epoch() + offset};
}

Date local_date(LocalSeconds ts) { return Date{floor<days>(ts)}; }

int slot_of_day(LocalSeconds ts) {
    const auto since_midnight = ts - floor<days>(ts);
    return static_cast<int>(since_midnight.count() / kSlotSeconds);
}

std::optional<UtcSeconds> parse_rfc3339(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (s.size() < 20) return std::nullopt;
    if (!read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
        !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        !read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi) || s[16] != ':' ||
        !read_int(s, 17, 2, se))
        return std::nullopt;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const auto start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (s[pos] != '0') return std::nullopt;
            ++pos;
        }
        if (pos == start) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;
    int offset_minutes = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (!read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_int(s, pos + 4, 2, om) || oh > 23 || om > 59)
            return std::nullopt;
        offset_minutes = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    if (h > 23 || mi > 59 || se > 59) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return UtcSeconds{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{se} - minutes{offset_minutes};
}

std::string format_rfc3339(UtcSeconds ts) {
    const auto dp = floor<days>(ts);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{ts - dp};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::optional<Date> parse_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || !read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, m) ||
        s[7] != '-' || !read_int(s, 8, 2, d))
        return std::nullopt;
    const Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

int days_since_epoch(Date d) { return static_cast<int>(sys_days{d}.time_since_epoch().count()); }

Date date_from_days(int n) { return Date{sys_days{days{n}}}; }

}  // namespace loadgen::data
