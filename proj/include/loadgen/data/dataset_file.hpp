#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadgen/data/conditions.hpp"
#include "loadgen/data/split.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::data {

inline constexpr char kDatasetMagic[8] = {'L', 'G', 'D', 'S', 'E', 'T', '0', '1'};

/// Columnar profile table used for prepared and generated data.
///
/// File layout (little-endian):
///   8 bytes   magic "LGDSET01"
///   u64       length of the metadata JSON, then the UTF-8 JSON text
///   u64       row count n
///   u64       profile length d
///   u32[n]    user index into metadata "users"
///   i32[n]    local date, days since 1970-01-01
///   u8[n]     split label (0 train, 1 test, 2 generated)
///   f64[n*3]  condition rows (month sin, month cos, rank)
///   f64[n*d]  profile rows
///
/// The metadata object always carries "kind", "users" (array of ids) and "scale_kw";
/// prepared files add "seed", "source_hash", "intensity" and "counts", generated files
/// add "noise", "mode" and "seed".
struct Dataset {
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::uint32_t> user_index;
    std::vector<std::int32_t> date;
    std::vector<Split> split;
    nn::Matrix conditions;
    nn::Matrix values;

    std::size_t size() const noexcept { return user_index.size(); }
    std::vector<std::string> users() const;
    double scale_kw() const;

    ConditionVector condition(std::size_t row) const;
    Date date_of(std::size_t row) const { return date_from_days(date[row]); }

    /// Rows carrying `label`, in file order.
    Dataset subset(Split label) const;
    Dataset rows(std::span<const std::size_t> indices) const;

    /// Throws FormatError if column lengths disagree.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
/// Throws FormatError on a bad magic number or truncated file.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace loadgen::data
