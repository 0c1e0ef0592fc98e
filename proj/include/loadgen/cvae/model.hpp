#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "loadgen/cvae/config.hpp"
#include "loadgen/nn/dense.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::cvae {

/// Bounds applied to every log-variance head output.
inline constexpr double kLogVarMin = -12.0;
inline constexpr double kLogVarMax = 12.0;

/// Diagonal Gaussian, stored as mean and log-variance.
struct GaussianParams {
    std::vector<double> mean;
    std::vector<double> log_var;

    std::vector<double> stddev() const;
};

/// Row-wise batch of diagonal Gaussians.
struct GaussianBatch {
    nn::Matrix mean;
    nn::Matrix log_var;

    std::size_t size() const noexcept { return mean.rows(); }
    nn::Matrix stddev() const;
    GaussianParams row(std::size_t i) const;
};

/// Latent code together with the standard-normal draw that produced it.
struct LatentSample {
    std::vector<double> z;
    std::vector<double> epsilon;
};

/// ReLU hidden stack followed by two linear heads (mean, log-variance).
struct GaussianNet {
    std::vector<nn::DenseLayer> hidden;
    nn::DenseLayer mean_head;
    nn::DenseLayer log_var_head;

    std::size_t in_dim() const noexcept;
    std::size_t out_dim() const noexcept { return mean_head.out_dim(); }

    GaussianBatch forward(const nn::Matrix& input) const;

    bool operator==(const GaussianNet&) const = default;
};

/// Named reference to one layer, in the canonical parameter order.
struct NamedLayer {
    std::string name;
    const nn::DenseLayer* layer;
};

class Cvae {
public:
    /// He-initialized network for `config`, seeded by config.seed.
    static Cvae initialize(const CvaeConfig& config);

    Cvae(CvaeConfig config, GaussianNet encoder, GaussianNet decoder);

    const CvaeConfig& config() const noexcept { return config_; }
    const GaussianNet& encoder() const noexcept { return encoder_; }
    const GaussianNet& decoder() const noexcept { return decoder_; }
    GaussianNet& encoder() noexcept { return encoder_; }
    GaussianNet& decoder() noexcept { return decoder_; }

    /// q(z | x, c) for a batch: x is n x data_dim, c is n x condition_dim.
    GaussianBatch encode(const nn::Matrix& x, const nn::Matrix& c) const;
    GaussianParams encode(std::span<const double> x, std::span<const double> c) const;

    /// p(x | z, c) for a batch: z is n x latent_dim.
    GaussianBatch decode(const nn::Matrix& z, const nn::Matrix& c) const;
    GaussianParams decode(std::span<const double> z, std::span<const double> c) const;

    /// Layers in canonical order: encoder hidden, encoder mean head, encoder log-variance
    /// head, then the same for the decoder.
    std::vector<NamedLayer> layers() const;
    std::vector<std::span<double>> parameter_views();
    std::size_t parameter_count() const;

    bool operator==(const Cvae&) const = default;

private:
    CvaeConfig config_;
    GaussianNet encoder_;
    GaussianNet decoder_;
};

/// z = mean + eps * sigma, row-wise. eps must match mean's shape.
nn::Matrix reparameterize(const GaussianBatch& q, const nn::Matrix& eps);
LatentSample reparameterize(const GaussianParams& q, std::span<const double> eps);

/// Batch mean of KL(N(mean, sigma^2) || N(0, I)) in closed form.
double kl_loss(const GaussianBatch& q);

/// Batch mean of 0.5 * sum_j ((x_j - mean_j)^2 / sigma_j^2 + log sigma_j^2).
double recon_loss(const nn::Matrix& x, const GaussianBatch& p);

double total_loss(double kl, double recon, double beta);

struct LossBreakdown {
    double kl = 0.0;
    double recon = 0.0;
    double total = 0.0;
};

/// Runs encode -> reparameterize (with the given eps) -> decode and returns the losses.
/// When `grads` is non-null it receives d total / d parameter for every layer in
/// canonical order.
LossBreakdown loss_and_gradients(const Cvae& model, const nn::Matrix& x, const nn::Matrix& c,
                                 const nn::Matrix& eps, std::vector<nn::LayerGradients>* grads);

}  // namespace loadgen::cvae
