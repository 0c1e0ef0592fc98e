#include "loadgen/eval/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadgen/errors.hpp"
#include "loadgen/nn/adam.hpp"
#include "loadgen/random.hpp"

namespace loadgen::eval {

using nn::Matrix;

AeConfig AeConfig::mirroring(const cvae::CvaeConfig& c) {
    AeConfig a;
    a.encoder_hidden = c.encoder_hidden;
    a.decoder_hidden = c.decoder_hidden;
    a.latent_dim = c.latent_dim;
    a.batch_size = c.batch_size;
    return a;
}

Matrix ReferenceAutoencoder::reconstruct(const Matrix& x) const { return nn::stack_forward(layers, x); }

ReferenceAutoencoder init_reference_ae(std::size_t data_dim, const AeConfig& cfg) {
    if (data_dim == 0 || cfg.latent_dim == 0) throw DataError("reference autoencoder: zero dimension");
    std::vector<nn::LayerShape> shapes;
    std::size_t prev = data_dim;
    for (auto h : cfg.encoder_hidden) {
        shapes.push_back({prev, h, nn::Activation::ReLU});
        prev = h;
    }
    shapes.push_back({prev, cfg.latent_dim, nn::Activation::Identity});
    prev = cfg.latent_dim;
    for (auto h : cfg.decoder_hidden) {
        shapes.push_back({prev, h, nn::Activation::ReLU});
        prev = h;
    }
    shapes.push_back({prev, data_dim, nn::Activation::Identity});
    return {nn::init_params(shapes, derive_seed(cfg.seed, "ae/init"))};
}

ReferenceAutoencoder train_reference_ae(const Matrix& train, const AeConfig& cfg, std::vector<double>* epoch_mse) {
    if (cfg.batch_size == 0) throw DataError("reference autoencoder: batch size must be >= 1");
    auto ae = init_reference_ae(train.cols(), cfg);
    if (cfg.epochs == 0) return ae;
    if (train.rows() == 0) throw DataError("reference autoencoder: empty training set");

    auto params = nn::parameter_views(ae.layers);
    auto adam = nn::AdamState::for_params(params, nn::AdamHyper{cfg.learning_rate});
    Rng rng(derive_seed(cfg.seed, "ae/shuffle"));
    std::vector<std::size_t> order(train.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double d = static_cast<double>(train.cols());
    nn::GradientTape tape;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const auto count = std::min(cfg.batch_size, order.size() - start);
            Matrix x = nn::gather_rows(train, std::span(order.data() + start, count));
            Matrix y = nn::stack_forward(ae.layers, x, &tape);
            const double scale = 1.0 / (static_cast<double>(count) * d);
            double loss = 0.0;
            Matrix grad(count, train.cols());
            auto yv = y.values();
            auto xv = x.values();
            auto gv = grad.values();
            for (std::size_t i = 0; i < yv.size(); ++i) {
                const double r = yv[i] - xv[i];
                loss += r * r;
                gv[i] = 2.0 * r * scale;
            }
            loss *= scale;
            if (!std::isfinite(loss))
                throw NumericError("reference autoencoder diverged at epoch " + std::to_string(epoch));
            auto g = nn::stack_backward(ae.layers, tape, grad);
            nn::adam_step(params, nn::gradient_views(g.layers), adam);
            sum += loss * static_cast<double>(count);
        }
        if (epoch_mse != nullptr) epoch_mse->push_back(sum / static_cast<double>(order.size()));
    }
    return ae;
}

std::vector<double> ae_recon_errors(const ReferenceAutoencoder& ae, const Matrix& x) {
    std::vector<double> out(x.rows());
    constexpr std::size_t chunk = 4096;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < x.rows(); start += chunk) {
        const auto count = std::min(chunk, x.rows() - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        Matrix xs = nn::gather_rows(x, idx);
        Matrix y = ae.reconstruct(xs);
        if (y.cols() != x.cols()) throw ShapeError("ae_recon_errors: autoencoder output width mismatch");
        for (std::size_t r = 0; r < count; ++r) {
            double s = 0.0;
            auto a = xs.row(r);
            auto b = y.row(r);
            for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
            out[start + r] = s / static_cast<double>(x.cols());
        }
    }
    return out;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw DataError("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ErrorSummary summarize_errors(std::span<const double> errors) {
    if (errors.empty()) throw DataError("summarize_errors: no errors");
    std::vector<double> v(errors.begin(), errors.end());
    std::sort(v.begin(), v.end());
    ErrorSummary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (std::size_t k = 0; k <= 10; ++k) s.deciles[k] = quantile(v, static_cast<double>(k) / 10.0);
    s.median = s.deciles[5];
    return s;
}

}  // namespace loadgen::eval
