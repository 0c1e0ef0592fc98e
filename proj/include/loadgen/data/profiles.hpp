#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "loadgen/data/ingest.hpp"
#include "loadgen/data/time.hpp"

namespace loadgen::data {

using ProfileValues = std::array<double, kSlotsPerDay>;

/// One customer-day of 15-minute average power, in local time.
struct DayProfile {
    std::string user_id;
    Date date{};
    ProfileValues values{};

    unsigned month() const noexcept { return static_cast<unsigned>(date.month()); }

    bool operator==(const DayProfile&) const = default;
};

/// Interval energy (kWh per 15 minutes) to average power (kW).
constexpr double energy_to_power(double kwh) noexcept { return kwh * 4.0; }

struct AssembledDays {
    std::vector<DayProfile> days;  // sorted by (user id, date)
    std::size_t dropped_incomplete = 0;  // fewer than 96 slots, e.g. spring DST days
    std::size_t dropped_duplicate = 0;   // a slot seen twice, e.g. autumn DST days
};

/// Converts readings to local time and power, then keeps only complete 96-slot days.
AssembledDays assemble_days(const MeterData& data);

}  // namespace loadgen::data
