#include "loadgen/cvae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "loadgen/errors.hpp"
#include "loadgen/nn/adam.hpp"
#include "loadgen/random.hpp"

namespace loadgen::cvae {

using nn::Matrix;

namespace {

void check_data(ConditionedData d, const CvaeConfig& cfg, const char* which) {
    if (d.profiles.rows() != d.conditions.rows())
        throw ShapeError(std::string(which) + ": profile and condition row counts differ");
    if (d.profiles.rows() > 0 && d.profiles.cols() != cfg.data_dim)
        throw ShapeError(std::string(which) + ": profiles have " + d.profiles.shape_string() +
                         ", expected " + std::to_string(cfg.data_dim) + " columns");
    if (d.conditions.rows() > 0 && d.conditions.cols() != cfg.condition_dim)
        throw ShapeError(std::string(which) + ": conditions have " + d.conditions.shape_string());
}

Matrix normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = normal(rng);
    return m;
}

}  // namespace

LossBreakdown evaluate_loss(const Cvae& model, ConditionedData data, std::uint64_t seed,
                            std::size_t chunk) {
    const auto n = data.profiles.rows();
    if (n == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan};
    }
    Rng rng(seed);
    LossBreakdown sum;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < n; start += chunk) {
        const auto count = std::min(chunk, n - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        Matrix x = nn::gather_rows(data.profiles, idx);
        Matrix c = nn::gather_rows(data.conditions, idx);
        Matrix eps = normal_matrix(count, model.config().latent_dim, rng);
        auto l = loss_and_gradients(model, x, c, eps, nullptr);
        const double w = static_cast<double>(count);
        sum.kl += l.kl * w;
        sum.recon += l.recon * w;
    }
    sum.kl /= static_cast<double>(n);
    sum.recon /= static_cast<double>(n);
    sum.total = total_loss(sum.kl, sum.recon, model.config().beta);
    return sum;
}

TrainResult train(ConditionedData train_set, ConditionedData test_set, const CvaeConfig& config,
                  const EpochCallback& on_epoch) {
    return train(Cvae::initialize(config), train_set, test_set, on_epoch);
}

TrainResult train(Cvae initial, ConditionedData train_set, ConditionedData test_set,
                  const EpochCallback& on_epoch) {
    const CvaeConfig cfg = initial.config();
    check_data(train_set, cfg, "train set");
    check_data(test_set, cfg, "test set");
    if (cfg.epochs > 0 && train_set.profiles.rows() == 0) throw DataError("train: empty training set");

    TrainResult result{std::move(initial), {}};
    auto& model = result.model;
    auto params = model.parameter_views();
    auto adam = nn::AdamState::for_params(params, nn::AdamHyper{cfg.learning_rate});

    Rng shuffle_rng(derive_seed(cfg.seed, "train/shuffle"));
    Rng eps_rng(derive_seed(cfg.seed, "train/epsilon"));
    const std::uint64_t test_seed = derive_seed(cfg.seed, "train/test-epsilon");

    const auto n = train_set.profiles.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<nn::LayerGradients> grads;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double kl_sum = 0.0;
        double recon_sum = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_no) {
            const auto count = std::min(cfg.batch_size, n - start);
            std::span<const std::size_t> idx(order.data() + start, count);
            Matrix x = nn::gather_rows(train_set.profiles, idx);
            Matrix c = nn::gather_rows(train_set.conditions, idx);
            Matrix eps = normal_matrix(count, cfg.latent_dim, eps_rng);

            LossBreakdown loss;
            try {
                loss = loss_and_gradients(model, x, c, eps, &grads);
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_no) + ": " + e.what());
            }
            std::vector<std::span<const double>> grad_views = nn::gradient_views(grads);
            for (const auto& g : grad_views) {
                if (!nn::all_finite(g))
                    throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                       ", batch " + std::to_string(batch_no) +
                                       ": non-finite gradient");
            }
            nn::adam_step(params, grad_views, adam);
            kl_sum += loss.kl * static_cast<double>(count);
            recon_sum += loss.recon * static_cast<double>(count);
        }

        EpochLosses row;
        row.epoch = epoch;
        row.train_beta_kl = cfg.beta * kl_sum / static_cast<double>(n);
        row.train_recon = recon_sum / static_cast<double>(n);
        const auto test = evaluate_loss(model, test_set, stream_seed(test_seed, epoch), cfg.batch_size);
        row.test_beta_kl = cfg.beta * test.kl;
        row.test_recon = test.recon;
        result.history.push_back(row);
        if (on_epoch) on_epoch(row);
    }
    return result;
}

}  // namespace loadgen::cvae
