#pragma once

#include <span>
#include <vector>

#include "loadgen/nn/matrix.hpp"

namespace loadgen::eval {

/// Per-column two-sample Kolmogorov-Smirnov statistics.
struct KsReport {
    std::vector<double> statistic;
    double mean = 0.0;
    double max = 0.0;
};

/// sup_t |F_a(t) - F_b(t)| of the two empirical CDFs. Both samples must be non-empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// ks_statistic for every column. Column counts must match.
KsReport ks_per_dimension(const nn::Matrix& a, const nn::Matrix& b);

}  // namespace loadgen::eval
