#include "loadgen/data/conditions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "loadgen/errors.hpp"

namespace loadgen::data {

double ConditionVector::month() const noexcept {
    double m = std::atan2(month_sin, month_cos) * 12.0 / (2.0 * std::numbers::pi);
    if (m <= 1e-9) m += 12.0;
    return m;
}

MonthEncoding month_condition(double month) {
    if (!(month > 0.0 && month <= 12.0))
        throw DataError("month_condition: month " + std::to_string(month) + " outside (0, 12]");
    const double angle = month / 12.0 * 2.0 * std::numbers::pi;
    return {std::sin(angle), std::cos(angle)};
}

ConditionVector make_condition(double month, double rank) {
    if (!(rank >= 0.0 && rank <= 1.0))
        throw DataError("make_condition: rank " + std::to_string(rank) + " outside [0, 1]");
    auto enc = month_condition(month);
    return {enc.sin, enc.cos, rank};
}

SizeClass size_class_of(double rank) noexcept {
    if (rank <= kSmallUpper) return SizeClass::Small;
    if (rank >= kLargeLower) return SizeClass::Large;
    return SizeClass::Medium;
}

std::array<double, 2> rank_range(SizeClass cls) noexcept {
    switch (cls) {
        case SizeClass::Small: return {0.0, kSmallUpper};
        case SizeClass::Medium: return {kSmallUpper, kLargeLower};
        case SizeClass::Large: return {kLargeLower, 1.0};
    }
    return {0.0, 1.0};
}

std::string_view to_string(SizeClass cls) noexcept {
    switch (cls) {
        case SizeClass::Small: return "small";
        case SizeClass::Medium: return "medium";
        case SizeClass::Large: return "large";
    }
    return "?";
}

std::optional<SizeClass> size_class_from_string(std::string_view s) noexcept {
    if (s == "small") return SizeClass::Small;
    if (s == "medium") return SizeClass::Medium;
    if (s == "large") return SizeClass::Large;
    return std::nullopt;
}

}  // namespace loadgen::data
