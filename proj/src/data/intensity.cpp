#include "loadgen/data/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "loadgen/errors.hpp"

namespace loadgen::data {

const UserIntensity* IntensityTable::find(const std::string& user_id) const {
    auto it = std::lower_bound(users.begin(), users.end(), user_id,
                               [](const UserIntensity& u, const std::string& id) { return u.user_id < id; });
    return it != users.end() && it->user_id == user_id ? &*it : nullptr;
}

std::optional<double> daily_exchange(const ProfileValues& values) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (v != 0.0) {
            sum += std::abs(v);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> user_intensity(std::span<const DayProfile> days) {
    std::vector<double> daily;
    for (const auto& d : days)
        if (auto e = daily_exchange(d.values)) daily.push_back(*e);
    if (daily.empty()) return std::nullopt;
    const auto top = std::min(kIntensityTopDays, daily.size());
    std::partial_sort(daily.begin(), daily.begin() + static_cast<std::ptrdiff_t>(top), daily.end(),
                      std::greater<>());
    return std::accumulate(daily.begin(), daily.begin() + static_cast<std::ptrdiff_t>(top), 0.0) /
           static_cast<double>(top);
}

IntensityResult compute_intensities(std::span<const DayProfile> days) {
    std::map<std::string, std::vector<DayProfile>> by_user;
    for (const auto& d : days) by_user[d.user_id].push_back(d);
    IntensityResult out;
    for (const auto& [user, user_days] : by_user) {
        if (auto v = user_intensity(user_days)) {
            out.table.users.push_back({user, *v, 0.0});
        } else {
            out.excluded.push_back(user);
        }
    }
    return out;
}

void rank_intensity(IntensityTable& table) {
    const auto n = table.users.size();
    if (n < 2) throw DataError("rank_intensity: at least two users are required, got " + std::to_string(n));
    std::sort(table.users.begin(), table.users.end(),
              [](const UserIntensity& a, const UserIntensity& b) { return a.user_id < b.user_id; });
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ua = table.users[a];
        const auto& ub = table.users[b];
        if (ua.intensity_kw != ub.intensity_kw) return ua.intensity_kw < ub.intensity_kw;
        return ua.user_id < ub.user_id;
    });
    for (std::size_t pos = 0; pos < n; ++pos)
        table.users[order[pos]].rank = static_cast<double>(pos) / static_cast<double>(n - 1);
}

FilteredProfiles filter_and_scale(std::span<const DayProfile> days, const IntensityTable& table,
                                  double max_intensity_kw, double scale_kw) {
    if (!(scale_kw > 0.0)) throw DataError("filter_and_scale: scale must be positive");
    FilteredProfiles out;
    out.scale_kw = scale_kw;
    for (const auto& u : table.users) {
        if (u.intensity_kw <= max_intensity_kw) {
            out.survivors.users.push_back(u);
        } else {
            out.removed.push_back(u.user_id);
        }
    }
    std::sort(out.survivors.users.begin(), out.survivors.users.end(),
              [](const UserIntensity& a, const UserIntensity& b) { return a.user_id < b.user_id; });
    if (out.survivors.users.empty()) throw DataError("filter_and_scale: no users within the intensity limit");
    rank_intensity(out.survivors);

    for (const auto& d : days) {
        const auto* u = out.survivors.find(d.user_id);
        if (u == nullptr) continue;
        PreparedProfile p{d, make_condition(static_cast<double>(d.month()), u->rank), Split::Train};
        for (double& v : p.day.values) v = scale_value(v, scale_kw);
        out.profiles.push_back(std::move(p));
    }
    return out;
}

}  // namespace loadgen::data
