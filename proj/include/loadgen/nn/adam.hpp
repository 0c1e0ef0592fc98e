#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace loadgen::nn {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates for a fixed list of parameter arrays.
struct AdamState {
    AdamHyper hyper;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::uint64_t step = 0;

    /// Zero moments for arrays of the given sizes. Validates the hyperparameters.
    static AdamState for_sizes(std::span<const std::size_t> sizes, const AdamHyper& hyper);
    static AdamState for_params(std::span<const std::span<double>> params, const AdamHyper& hyper);
};

/// One bias-corrected Adam update of every parameter array; increments state.step.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

}  // namespace loadgen::nn
