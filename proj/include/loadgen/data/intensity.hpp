#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadgen/data/conditions.hpp"
#include "loadgen/data/profiles.hpp"
#include "loadgen/data/split.hpp"

namespace loadgen::data {

inline constexpr double kDefaultScaleKw = 100.0;
inline constexpr double kDefaultMaxIntensityKw = 100.0;
inline constexpr std::size_t kIntensityTopDays = 5;

struct UserIntensity {
    std::string user_id;
    double intensity_kw = 0.0;
    double rank = 0.0;

    bool operator==(const UserIntensity&) const = default;
};

/// Per-user intensity and rank, sorted by user id.
struct IntensityTable {
    std::vector<UserIntensity> users;

    const UserIntensity* find(const std::string& user_id) const;
};

/// Mean |power| over the non-zero slots of one day; nullopt for an all-zero day.
std::optional<double> daily_exchange(const ProfileValues& values);

/// Mean of the (up to) five largest daily exchanges of one user's days.
/// nullopt when every day is all-zero.
std::optional<double> user_intensity(std::span<const DayProfile> days);

struct IntensityResult {
    IntensityTable table;             // ranks not yet assigned
    std::vector<std::string> excluded;  // users with only all-zero days
};

/// Groups `days` by user (any order) and computes each user's intensity.
IntensityResult compute_intensities(std::span<const DayProfile> days);

/// Sorts the table by user id, then ranks ascending by intensity (ties by user id):
/// rank = position / (n - 1).
/// Throws DataError for fewer than two users.
void rank_intensity(IntensityTable& table);

/// A training-ready profile: values divided by the scale constant, condition attached.
struct PreparedProfile {
    DayProfile day;
    ConditionVector condition;
    Split split = Split::Train;

    bool operator==(const PreparedProfile&) const = default;
};

struct FilteredProfiles {
    std::vector<PreparedProfile> profiles;
    IntensityTable survivors;  // re-ranked
    std::vector<std::string> removed;  // above the intensity limit
    double scale_kw = kDefaultScaleKw;
};

/// Drops users above `max_intensity_kw` (the limit itself is kept) and users absent from
/// the table, re-ranks the survivors, and scales every value by 1 / scale_kw.
/// Throws DataError if fewer than two users survive.
FilteredProfiles filter_and_scale(std::span<const DayProfile> days, const IntensityTable& table,
                                  double max_intensity_kw = kDefaultMaxIntensityKw,
                                  double scale_kw = kDefaultScaleKw);

constexpr double scale_value(double kw, double scale_kw = kDefaultScaleKw) noexcept { return kw / scale_kw; }
constexpr double unscale_value(double v, double scale_kw = kDefaultScaleKw) noexcept { return v * scale_kw; }

}  // namespace loadgen::data
