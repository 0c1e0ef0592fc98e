#pragma once

#include <string>
#include <vector>

#include "loadgen/data/conditions.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::eval {

inline constexpr const char* kTrain = "train";
inline constexpr const char* kTest = "test";
inline constexpr const char* kGenNoisy = "gen-noisy";
inline constexpr const char* kGenNoiseFree = "gen-noisefree";

/// Named set of profiles (one per row) with their conditions.
struct SampleSet {
    std::string label;
    nn::Matrix profiles;
    std::vector<data::ConditionVector> conditions;  // empty, or one per row

    std::size_t size() const noexcept { return profiles.rows(); }
};

/// Month label (1..12) of a condition, rounding non-integer months to the nearest one.
unsigned nearest_month(const data::ConditionVector& c) noexcept;

}  // namespace loadgen::eval
