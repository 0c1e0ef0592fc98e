#include "loadgen/eval/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "loadgen/data/time.hpp"
#include "loadgen/errors.hpp"

namespace loadgen::eval {

std::string_view to_string(CdfGrouping g) noexcept {
    switch (g) {
        case CdfGrouping::Month: return "month";
        case CdfGrouping::Hour: return "hour";
        case CdfGrouping::SizeClass: return "size-class";
        case CdfGrouping::Interpolation: return "interpolation";
    }
    return "?";
}

CdfGrouping cdf_grouping_from_string(std::string_view name) {
    if (name == "month") return CdfGrouping::Month;
    if (name == "hour") return CdfGrouping::Hour;
    if (name == "size-class") return CdfGrouping::SizeClass;
    if (name == "interpolation") return CdfGrouping::Interpolation;
    throw DataError("unknown CDF grouping '" + std::string(name) + "'");
}

const std::vector<double>& CdfTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return cdfs[i];
    throw DataError("CDF table has no column '" + name + "'");
}

std::vector<double> empirical_cdf(std::vector<double> values, std::span<const double> grid) {
    std::sort(values.begin(), values.end());
    std::vector<double> out(grid.size(), 0.0);
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto it = std::upper_bound(values.begin(), values.end(), grid[i]);
        out[i] = static_cast<double>(it - values.begin()) / n;
    }
    return out;
}

namespace {

std::string two_digits(char prefix, unsigned v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%c%02u", prefix, v);
    return buf;
}

}  // namespace

CdfTable cdf_export(std::span<const SampleSet> sets, CdfGrouping grouping, std::size_t grid_points) {
    if (grid_points < 2) throw DataError("cdf_export: need at least two grid points");
    // (column name) -> values, ordered by set then group.
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    for (const auto& s : sets) {
        const bool need_conditions = grouping != CdfGrouping::Hour;
        if (need_conditions && s.conditions.size() != s.size())
            throw DataError("cdf_export: set '" + s.label + "' lacks per-profile conditions");
        std::map<std::string, std::vector<double>> by_group;
        for (std::size_t r = 0; r < s.size(); ++r) {
            auto row = s.profiles.row(r);
            switch (grouping) {
                case CdfGrouping::Month: {
                    auto& g = by_group[two_digits('m', nearest_month(s.conditions[r]))];
                    g.insert(g.end(), row.begin(), row.end());
                    break;
                }
                case CdfGrouping::Interpolation: {
                    const double m = std::round(s.conditions[r].month() * 2.0) / 2.0;
                    char buf[16];
                    std::snprintf(buf, sizeof buf, "m%04.1f", m);
                    auto& g = by_group[buf];
                    g.insert(g.end(), row.begin(), row.end());
                    break;
                }
                case CdfGrouping::SizeClass: {
                    auto& g = by_group[std::string(data::to_string(data::size_class_of(s.conditions[r].rank)))];
                    g.insert(g.end(), row.begin(), row.end());
                    break;
                }
                case CdfGrouping::Hour: {
                    const std::size_t per_hour = std::max<std::size_t>(1, row.size() / 24);
                    for (std::size_t j = 0; j < row.size(); ++j)
                        by_group[two_digits('h', static_cast<unsigned>(j / per_hour))].push_back(row[j]);
                    break;
                }
            }
        }
        if (grouping == CdfGrouping::SizeClass) {
            for (auto cls : {data::SizeClass::Small, data::SizeClass::Medium, data::SizeClass::Large}) {
                const auto it = by_group.find(std::string(data::to_string(cls)));
                if (it != by_group.end()) groups.emplace_back(s.label + ":" + it->first, std::move(it->second));
            }
        } else {
            for (auto& [name, values] : by_group) groups.emplace_back(s.label + ":" + name, std::move(values));
        }
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& g : groups)
        for (double v : g.second) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (groups.empty() || !std::isfinite(lo)) throw DataError("cdf_export: no values to tabulate");
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    CdfTable t;
    t.grouping = grouping;
    t.grid.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        t.grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    for (auto& [name, values] : groups) {
        t.columns.push_back(name);
        t.cdfs.push_back(empirical_cdf(std::move(values), t.grid));
    }
    return t;
}

double fraction_between(std::span<const double> a, std::span<const double> mid, std::span<const double> b) {
    if (a.size() != mid.size() || b.size() != mid.size() || mid.empty())
        throw ShapeError("fraction_between: CDF lengths differ or are empty");
    std::size_t inside = 0;
    for (std::size_t i = 0; i < mid.size(); ++i)
        if (mid[i] >= std::min(a[i], b[i]) && mid[i] <= std::max(a[i], b[i])) ++inside;
    return static_cast<double>(inside) / static_cast<double>(mid.size());
}

void write_cdf_csv(const CdfTable& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "value";
    for (const auto& c : t.columns) out << ',' << c;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", t.grid[i]);
        out << buf;
        for (const auto& col : t.cdfs) {
            std::snprintf(buf, sizeof buf, "%.9g", col[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace loadgen::eval
