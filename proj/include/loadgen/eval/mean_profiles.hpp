#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadgen/data/conditions.hpp"
#include "loadgen/eval/sample_set.hpp"

namespace loadgen::eval {

/// Profiles whose nearest month equals `month` and whose rank falls in `size_class`.
struct ProfileFilter {
    unsigned month = 1;
    data::SizeClass size_class = data::SizeClass::Small;

    bool matches(const data::ConditionVector& c) const noexcept;
    std::string name() const;  // e.g. "m04-large"
};

struct MeanProfileEntry {
    std::string set;
    std::size_t matched = 0;
    std::vector<double> mean;
    nn::Matrix samples;  // up to n_samples matched rows, drawn without replacement
    std::vector<std::size_t> sample_rows;
};

/// Per set: mean of the matching profiles and a seeded random selection of them.
/// Throws DataError if a set has no profile matching the filter.
std::vector<MeanProfileEntry> mean_profile_compare(std::span<const SampleSet> sets, const ProfileFilter& filter,
                                                   std::uint64_t seed, std::size_t n_samples = 10);

}  // namespace loadgen::eval
