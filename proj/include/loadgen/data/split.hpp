#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>

#include "loadgen/data/profiles.hpp"

namespace loadgen::data {

enum class Split : std::uint8_t { Train = 0, Test = 1, Generated = 2 };

std::string_view to_string(Split s) noexcept;

/// Train/test labels for consecutive 7-day calendar blocks shared by all users.
/// Block 0 starts on `anchor`, the first Monday on or after the earliest date; days
/// before the anchor fall in block -1.
struct SplitAssignment {
    Date anchor{};
    std::map<int, Split> blocks;

    int block_of(Date d) const noexcept;
    /// Label of the block containing `d`; days outside every known block are Train.
    Split label_for(Date d) const noexcept;
    std::size_t test_block_count() const noexcept;
};

/// Assigns whole weeks to the test set: the blocks are shuffled with `seed` and the
/// first round(n / 5) become test blocks (at least one when n >= 2), giving a 4:1 ratio
/// of blocks. Throws DataError when `days` is empty.
SplitAssignment week_block_split(std::span<const DayProfile> days, std::uint64_t seed);

}  // namespace loadgen::data
