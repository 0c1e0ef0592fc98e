#include "loadgen/data/profiles.hpp"

#include <bitset>
#include <map>
#include <utility>

namespace loadgen::data {

namespace {

struct DayAccumulator {
    ProfileValues values{};
    std::bitset<kSlotsPerDay> seen;
    bool duplicate = false;
};

}  // namespace

AssembledDays assemble_days(const MeterData& data) {
    // Users are indexed in lexicographic order, so (user index, day) ordering matches
    // (user id, date).
    std::map<std::pair<std::uint32_t, int>, DayAccumulator> days;
    for (const auto& r : data.records) {
        const auto local = utc_to_local(r.timestamp);
        const int day = days_since_epoch(local_date(local));
        const int slot = slot_of_day(local);
        auto& acc = days[{r.user, day}];
        if (acc.seen.test(static_cast<std::size_t>(slot))) {
            acc.duplicate = true;
            continue;
        }
        acc.seen.set(static_cast<std::size_t>(slot));
        acc.values[static_cast<std::size_t>(slot)] = energy_to_power(r.energy_kwh);
    }

    AssembledDays out;
    for (auto& [key, acc] : days) {
        if (acc.duplicate) {
            ++out.dropped_duplicate;
        } else if (!acc.seen.all()) {
            ++out.dropped_incomplete;
        } else {
            out.days.push_back({data.users[key.first], date_from_days(key.second), acc.values});
        }
    }
    return out;
}

}  // namespace loadgen::data
