#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadgen/eval/sample_set.hpp"

namespace loadgen::eval {

enum class CdfGrouping { Month, Hour, SizeClass, Interpolation };

std::string_view to_string(CdfGrouping g) noexcept;
/// Throws DataError on an unknown name.
CdfGrouping cdf_grouping_from_string(std::string_view name);

inline constexpr std::size_t kCdfGridPoints = 512;

/// One empirical CDF per (set, group), evaluated on a shared grid.
struct CdfTable {
    CdfGrouping grouping = CdfGrouping::Month;
    std::vector<double> grid;
    std::vector<std::string> columns;  // "<set>:<group>"
    std::vector<std::vector<double>> cdfs;

    /// Column by name; throws DataError if absent.
    const std::vector<double>& column(const std::string& name) const;
};

/// Fraction of `values` <= each grid point.
std::vector<double> empirical_cdf(std::vector<double> values, std::span<const double> grid);

/// Groups every value of every profile and tabulates CDFs on a grid spanning the pooled
/// range (widened by 0.5 on each side when all values coincide).
///   month          group = nearest calendar month, "m01".."m12"
///   hour           group = local hour of the slot, "h00".."h23"
///   size-class     group = small / medium / large from the rank
///   interpolation  group = month condition to 0.5 resolution, e.g. "m11.5"
/// Month, size-class and interpolation need per-row conditions.
CdfTable cdf_export(std::span<const SampleSet> sets, CdfGrouping grouping,
                    std::size_t grid_points = kCdfGridPoints);

/// Share of grid points where `mid` lies between `a` and `b` (inclusive, either order).
double fraction_between(std::span<const double> a, std::span<const double> mid, std::span<const double> b);

void write_cdf_csv(const CdfTable& table, const std::filesystem::path& path);

}  // namespace loadgen::eval
