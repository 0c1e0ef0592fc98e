#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace loadgen::cvae {

/// Network shape and training hyperparameters. Defaults are the full-scale setup
/// (96-dim profiles, 3 x 800 hidden units, 12-dim latent, beta 8.5, lr 1e-5,
/// batch 1280, 1000 epochs).
struct CvaeConfig {
    std::size_t data_dim = 96;
    std::size_t latent_dim = 12;
    std::size_t condition_dim = 3;
    std::vector<std::size_t> encoder_hidden{800, 800, 800};
    std::vector<std::size_t> decoder_hidden{800, 800, 800};
    double beta = 8.5;
    double learning_rate = 1e-5;
    std::size_t batch_size = 1280;
    std::size_t epochs = 1000;
    std::uint64_t seed = 0;

    /// Throws DataError when any dimension is zero or beta / learning_rate is not positive.
    void validate() const;

    /// Scaled-down preset used for desk-scale runs on simulated data.
    static CvaeConfig desk();

    bool operator==(const CvaeConfig&) const = default;
};

}  // namespace loadgen::cvae
