#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace loadgen::data {

/// Cyclic month encoding plus the customer intensity rank.
struct ConditionVector {
    double month_sin = 0.0;
    double month_cos = 1.0;
    double rank = 0.0;

    static constexpr std::size_t kDim = 3;

    std::array<double, kDim> as_array() const noexcept { return {month_sin, month_cos, rank}; }
    /// Recovers the month in (0, 12] from the angle.
    double month() const noexcept;

    bool operator==(const ConditionVector&) const = default;
};

struct MonthEncoding {
    double sin = 0.0;
    double cos = 1.0;
};

/// (sin(2 pi m / 12), cos(2 pi m / 12)). Non-integer months are allowed;
/// throws DataError when m lies outside (0, 12].
MonthEncoding month_condition(double month);

ConditionVector make_condition(double month, double rank);

/// Customer size class by intensity rank: small <= 0.3, large >= 0.7, medium otherwise.
enum class SizeClass { Small, Medium, Large };

inline constexpr double kSmallUpper = 0.3;
inline constexpr double kLargeLower = 0.7;

SizeClass size_class_of(double rank) noexcept;
/// Closed rank interval [lo, hi] covered by a class.
std::array<double, 2> rank_range(SizeClass cls) noexcept;
std::string_view to_string(SizeClass cls) noexcept;
std::optional<SizeClass> size_class_from_string(std::string_view s) noexcept;

}  // namespace loadgen::data
