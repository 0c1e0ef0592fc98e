#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace loadgen::data {

using UtcSeconds = std::chrono::sys_seconds;
using LocalSeconds = std::chrono::local_seconds;
using Date = std::chrono::year_month_day;

inline constexpr int kSlotsPerDay = 96;
inline constexpr int kSlotSeconds = 15 * 60;

/// Start and end of EU summer time in `year`: last Sunday of March 01:00 UTC to last
/// Sunday of October 01:00 UTC. Valid for 1996 onwards.
UtcSeconds eu_summer_time_start(int year);
UtcSeconds eu_summer_time_end(int year);
bool is_eu_summer_time(UtcSeconds ts);

/// Central European wall-clock time: UTC+1, or UTC+2 during summer time.
LocalSeconds utc_to_local(UtcSeconds ts);

/// Calendar date and 15-minute slot index (0..95) of a local instant.
Date local_date(LocalSeconds ts);
int slot_of_day(LocalSeconds ts);

/// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z" or "+HH:MM"/"-HH:MM" (RFC 3339; a
/// fractional second part is accepted only if it is zero). Returns nullopt on any
/// syntax or range error.
std::optional<UtcSeconds> parse_rfc3339(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_rfc3339(UtcSeconds ts);

std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);

/// Days since 1970-01-01.
int days_since_epoch(Date d);
Date date_from_days(int days);

}  // namespace loadgen::data
