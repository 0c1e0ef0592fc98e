#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadgen/cvae/config.hpp"
#include "loadgen/nn/dense.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::eval {

/// Plain deterministic autoencoder used to score individual profiles.
struct AeConfig {
    std::vector<std::size_t> encoder_hidden{800, 800, 800};
    std::vector<std::size_t> decoder_hidden{800, 800, 800};
    std::size_t latent_dim = 12;
    std::size_t epochs = 100;
    std::size_t batch_size = 1280;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;

    /// Same hidden widths and latent width as the CVAE.
    static AeConfig mirroring(const cvae::CvaeConfig& c);
};

/// x -> ReLU hidden -> linear bottleneck -> ReLU hidden -> linear output.
struct ReferenceAutoencoder {
    std::vector<nn::DenseLayer> layers;

    nn::Matrix reconstruct(const nn::Matrix& x) const;
    bool operator==(const ReferenceAutoencoder&) const = default;
};

ReferenceAutoencoder init_reference_ae(std::size_t data_dim, const AeConfig& config);

/// Adam on the mean squared reconstruction error. `epoch_mse` (optional) receives the
/// batch-weighted training MSE of every epoch. Throws NumericError on divergence.
ReferenceAutoencoder train_reference_ae(const nn::Matrix& train, const AeConfig& config,
                                        std::vector<double>* epoch_mse = nullptr);

/// Per-profile squared reconstruction error divided by the profile length.
std::vector<double> ae_recon_errors(const ReferenceAutoencoder& ae, const nn::Matrix& x);

struct ErrorSummary {
    double mean = 0.0;
    double median = 0.0;
    std::array<double, 11> deciles{};  // 0 %, 10 %, ..., 100 %
};

/// Linear-interpolated quantiles. Throws DataError on an empty input.
ErrorSummary summarize_errors(std::span<const double> errors);
double quantile(std::vector<double> values, double q);

}  // namespace loadgen::eval
