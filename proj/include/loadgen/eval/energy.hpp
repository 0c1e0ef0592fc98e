#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loadgen/nn/matrix.hpp"

namespace loadgen::eval {

struct EnergyReport {
    double estimate = 0.0;
    double standard_error = 0.0;  // across repeats; 0 for a single repeat
    std::size_t subsample = 0;
    std::size_t repeats = 0;
    std::vector<double> per_repeat;
};

/// 2 E|X - Y| - E|X - X'| - E|Y - Y'| over all rows, Euclidean norm, with the
/// within-sample terms averaged over distinct pairs. Each set needs at least two rows.
double energy_distance_full(const nn::Matrix& a, const nn::Matrix& b);

/// Mean and standard error of energy_distance_full over `repeats` seeded subsamples of
/// `subsample` rows drawn without replacement from each set.
/// Throws DataError if subsample < 2 or exceeds either set size.
EnergyReport energy_distance(const nn::Matrix& a, const nn::Matrix& b, std::size_t subsample,
                             std::size_t repeats, std::uint64_t seed);

}  // namespace loadgen::eval
