#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "loadgen/cvae/config.hpp"
#include "loadgen/cvae/model.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::cvae {

/// Losses of one epoch. KL columns are already multiplied by beta.
struct EpochLosses {
    std::size_t epoch = 0;  // 1-based
    double train_beta_kl = 0.0;
    double train_recon = 0.0;
    double test_beta_kl = 0.0;
    double test_recon = 0.0;

    double train_total() const noexcept { return train_beta_kl + train_recon; }
    double test_total() const noexcept { return test_beta_kl + test_recon; }

    bool operator==(const EpochLosses&) const = default;
};

/// Profiles with their condition rows (same row count).
struct ConditionedData {
    const nn::Matrix& profiles;
    const nn::Matrix& conditions;
};

struct TrainResult {
    Cvae model;
    std::vector<EpochLosses> history;
};

using EpochCallback = std::function<void(const EpochLosses&)>;

/// Trains from a fresh initialization of `config`.
TrainResult train(ConditionedData train_set, ConditionedData test_set, const CvaeConfig& config,
                  const EpochCallback& on_epoch = {});

/// Trains `initial` for initial.config().epochs epochs.
/// Each epoch reshuffles (seeded), draws one eps per sample, and takes one Adam step per
/// batch. Training losses are batch-size weighted means over the epoch; test losses are
/// a full pass after the epoch. An empty test set yields NaN test losses.
/// Throws NumericError naming the epoch and batch if the loss becomes non-finite.
TrainResult train(Cvae initial, ConditionedData train_set, ConditionedData test_set,
                  const EpochCallback& on_epoch = {});

/// Mean (kl, recon) over a data set using eps drawn from `seed`, in chunks of `chunk` rows.
LossBreakdown evaluate_loss(const Cvae& model, ConditionedData data, std::uint64_t seed,
                            std::size_t chunk);

}  // namespace loadgen::cvae
