#include "loadgen/cvae/model.hpp"

#include <algorithm>
#include <cmath>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::cvae {

using nn::Matrix;

void CvaeConfig::validate() const {
    if (data_dim == 0 || latent_dim == 0 || condition_dim == 0)
        throw DataError("CvaeConfig: data, latent and condition dimensions must be >= 1");
    for (auto h : encoder_hidden)
        if (h == 0) throw DataError("CvaeConfig: encoder hidden sizes must be >= 1");
    for (auto h : decoder_hidden)
        if (h == 0) throw DataError("CvaeConfig: decoder hidden sizes must be >= 1");
    if (!(beta > 0.0)) throw DataError("CvaeConfig: beta must be positive");
    if (!(learning_rate > 0.0)) throw DataError("CvaeConfig: learning rate must be positive");
    if (batch_size == 0) throw DataError("CvaeConfig: batch size must be >= 1");
}

CvaeConfig CvaeConfig::desk() {
    CvaeConfig c;
    c.latent_dim = 8;
    c.encoder_hidden = {128, 128};
    c.decoder_hidden = {128, 128};
    c.beta = 4.0;
    c.learning_rate = 1e-3;
    c.batch_size = 256;
    c.epochs = 60;
    return c;
}

namespace {

double clamp_log_var(double v) { return std::clamp(v, kLogVarMin, kLogVarMax); }

bool inside_clamp(double raw) { return raw >= kLogVarMin && raw <= kLogVarMax; }

void check_cols(const Matrix& m, std::size_t cols, const char* what) {
    if (m.cols() != cols) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(cols) +
                         " columns, got " + m.shape_string());
    }
}

Matrix row_matrix(std::span<const double> v) { return Matrix::from_values(1, v.size(), v); }

GaussianNet init_net(std::size_t in, std::span<const std::size_t> hidden, std::size_t out,
                     std::uint64_t seed) {
    std::vector<nn::LayerShape> shapes;
    std::size_t prev = in;
    for (auto h : hidden) {
        shapes.push_back({prev, h, nn::Activation::ReLU});
        prev = h;
    }
    shapes.push_back({prev, out, nn::Activation::Identity});
    shapes.push_back({prev, out, nn::Activation::Identity});
    auto layers = nn::init_params(shapes, seed);
    GaussianNet net;
    net.log_var_head = std::move(layers.back());
    layers.pop_back();
    net.mean_head = std::move(layers.back());
    layers.pop_back();
    net.hidden = std::move(layers);
    return net;
}

void validate_net(const GaussianNet& net, std::size_t in, std::span<const std::size_t> hidden,
                  std::size_t out, const char* which) {
    auto fail = [which](const std::string& msg) {
        throw ShapeError(std::string(which) + ": " + msg);
    };
    if (net.hidden.size() != hidden.size()) fail("hidden layer count does not match config");
    std::size_t prev = in;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        const auto& l = net.hidden[i];
        if (l.in_dim() != prev || l.out_dim() != hidden[i] || l.bias.size() != hidden[i])
            fail("hidden layer " + std::to_string(i) + " has shape " + l.weights.shape_string());
        if (l.activation != nn::Activation::ReLU) fail("hidden layers must use ReLU");
        prev = hidden[i];
    }
    for (const auto* head : {&net.mean_head, &net.log_var_head}) {
        if (head->in_dim() != prev || head->out_dim() != out || head->bias.size() != out)
            fail("head has shape " + head->weights.shape_string());
        if (head->activation != nn::Activation::Identity) fail("heads must be linear");
    }
}

}  // namespace

std::vector<double> GaussianParams::stddev() const {
    std::vector<double> s(log_var.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(0.5 * log_var[i]);
    return s;
}

Matrix GaussianBatch::stddev() const {
    Matrix s(log_var.rows(), log_var.cols());
    auto lv = log_var.values();
    auto out = s.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(0.5 * lv[i]);
    return s;
}

GaussianParams GaussianBatch::row(std::size_t i) const {
    auto m = mean.row(i);
    auto lv = log_var.row(i);
    return {{m.begin(), m.end()}, {lv.begin(), lv.end()}};
}

std::size_t GaussianNet::in_dim() const noexcept {
    return hidden.empty() ? mean_head.in_dim() : hidden.front().in_dim();
}

GaussianBatch GaussianNet::forward(const Matrix& input) const {
    Matrix h = nn::stack_forward(hidden, input);
    GaussianBatch out{nn::dense_forward(mean_head, h), nn::dense_forward(log_var_head, h)};
    for (double& v : out.log_var.values()) v = clamp_log_var(v);
    return out;
}

Cvae Cvae::initialize(const CvaeConfig& config) {
    config.validate();
    const auto in_enc = config.data_dim + config.condition_dim;
    const auto in_dec = config.latent_dim + config.condition_dim;
    return Cvae(config,
                init_net(in_enc, config.encoder_hidden, config.latent_dim,
                         derive_seed(config.seed, "init/encoder")),
                init_net(in_dec, config.decoder_hidden, config.data_dim,
                         derive_seed(config.seed, "init/decoder")));
}

Cvae::Cvae(CvaeConfig config, GaussianNet encoder, GaussianNet decoder)
    : config_(std::move(config)), encoder_(std::move(encoder)), decoder_(std::move(decoder)) {
    config_.validate();
    validate_net(encoder_, config_.data_dim + config_.condition_dim, config_.encoder_hidden,
                 config_.latent_dim, "encoder");
    validate_net(decoder_, config_.latent_dim + config_.condition_dim, config_.decoder_hidden,
                 config_.data_dim, "decoder");
}

GaussianBatch Cvae::encode(const Matrix& x, const Matrix& c) const {
    check_cols(x, config_.data_dim, "encode: data");
    check_cols(c, config_.condition_dim, "encode: condition");
    return encoder_.forward(nn::hconcat(x, c));
}

GaussianParams Cvae::encode(std::span<const double> x, std::span<const double> c) const {
    return encode(row_matrix(x), row_matrix(c)).row(0);
}

GaussianBatch Cvae::decode(const Matrix& z, const Matrix& c) const {
    check_cols(z, config_.latent_dim, "decode: latent");
    check_cols(c, config_.condition_dim, "decode: condition");
    return decoder_.forward(nn::hconcat(z, c));
}

GaussianParams Cvae::decode(std::span<const double> z, std::span<const double> c) const {
    return decode(row_matrix(z), row_matrix(c)).row(0);
}

std::vector<NamedLayer> Cvae::layers() const {
    std::vector<NamedLayer> out;
    auto add = [&out](const std::string& prefix, const GaussianNet& net) {
        for (std::size_t i = 0; i < net.hidden.size(); ++i)
            out.push_back({prefix + ".hidden." + std::to_string(i), &net.hidden[i]});
        out.push_back({prefix + ".mean", &net.mean_head});
        out.push_back({prefix + ".log_var", &net.log_var_head});
    };
    add("encoder", encoder_);
    add("decoder", decoder_);
    return out;
}

std::vector<std::span<double>> Cvae::parameter_views() {
    std::vector<std::span<double>> views;
    auto add = [&views](GaussianNet& net) {
        for (auto& l : net.hidden) {
            views.push_back(l.weights.values());
            views.push_back(l.bias);
        }
        for (auto* head : {&net.mean_head, &net.log_var_head}) {
            views.push_back(head->weights.values());
            views.push_back(head->bias);
        }
    };
    add(encoder_);
    add(decoder_);
    return views;
}

std::size_t Cvae::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers()) n += l.layer->weights.size() + l.layer->bias.size();
    return n;
}

Matrix reparameterize(const GaussianBatch& q, const Matrix& eps) {
    if (eps.rows() != q.mean.rows() || eps.cols() != q.mean.cols()) {
        throw ShapeError("reparameterize: eps " + eps.shape_string() + " vs mean " +
                         q.mean.shape_string());
    }
    Matrix z(eps.rows(), eps.cols());
    auto m = q.mean.values();
    auto lv = q.log_var.values();
    auto e = eps.values();
    auto out = z.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = m[i] + e[i] * std::exp(0.5 * lv[i]);
    return z;
}

LatentSample reparameterize(const GaussianParams& q, std::span<const double> eps) {
    if (eps.size() != q.mean.size() || q.log_var.size() != q.mean.size()) {
        throw ShapeError("reparameterize: eps length " + std::to_string(eps.size()) +
                         " vs mean length " + std::to_string(q.mean.size()));
    }
    LatentSample s{std::vector<double>(eps.size()), {eps.begin(), eps.end()}};
    for (std::size_t i = 0; i < eps.size(); ++i)
        s.z[i] = q.mean[i] + eps[i] * std::exp(0.5 * q.log_var[i]);
    return s;
}

double kl_loss(const GaussianBatch& q) {
    if (q.size() == 0) throw ShapeError("kl_loss: empty batch");
    auto m = q.mean.values();
    auto lv = q.log_var.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sum += m[i] * m[i] + std::exp(lv[i]) - lv[i] - 1.0;
    return 0.5 * sum / static_cast<double>(q.size());
}

double recon_loss(const Matrix& x, const GaussianBatch& p) {
    if (x.rows() != p.mean.rows() || x.cols() != p.mean.cols())
        throw ShapeError("recon_loss: data " + x.shape_string() + " vs mean " + p.mean.shape_string());
    if (x.rows() == 0) throw ShapeError("recon_loss: empty batch");
    auto xv = x.values();
    auto m = p.mean.values();
    auto lv = p.log_var.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double r = xv[i] - m[i];
        sum += r * r * std::exp(-lv[i]) + lv[i];
    }
    return 0.5 * sum / static_cast<double>(x.rows());
}

double total_loss(double kl, double recon, double beta) {
    if (!(beta > 0.0)) throw DataError("total_loss: beta must be positive");
    return beta * kl + recon;
}

namespace {

struct NetPass {
    nn::GradientTape hidden_tape;
    nn::GradientTape mean_tape;
    nn::GradientTape log_var_tape;
    Matrix log_var_raw;
    GaussianBatch out;
};

NetPass forward_with_tape(const GaussianNet& net, const Matrix& input) {
    NetPass pass;
    Matrix h = nn::stack_forward(net.hidden, input, &pass.hidden_tape);
    pass.out.mean = nn::dense_forward(net.mean_head, h, &pass.mean_tape);
    pass.log_var_raw = nn::dense_forward(net.log_var_head, h, &pass.log_var_tape);
    pass.out.log_var = pass.log_var_raw;
    for (double& v : pass.out.log_var.values()) v = clamp_log_var(v);
    return pass;
}

/// Back-propagates gradients w.r.t. (mean, clamped log-var) through a GaussianNet.
/// Appends layer gradients in canonical order and returns d/d input.
Matrix backward_net(const GaussianNet& net, NetPass& pass, const Matrix& d_mean, Matrix d_log_var,
                    std::vector<nn::LayerGradients>& grads) {
    auto raw = pass.log_var_raw.values();
    auto dlv = d_log_var.values();
    for (std::size_t i = 0; i < dlv.size(); ++i)
        if (!inside_clamp(raw[i])) dlv[i] = 0.0;

    auto g_mean = nn::stack_backward(std::span(&net.mean_head, 1), pass.mean_tape, d_mean);
    auto g_lv = nn::stack_backward(std::span(&net.log_var_head, 1), pass.log_var_tape, d_log_var);
    Matrix d_h = g_mean.input;
    {
        auto a = d_h.values();
        auto b = g_lv.input.values();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    }
    auto g_hidden = nn::stack_backward(net.hidden, pass.hidden_tape, d_h);
    for (auto& g : g_hidden.layers) grads.push_back(std::move(g));
    grads.push_back(std::move(g_mean.layers.front()));
    grads.push_back(std::move(g_lv.layers.front()));
    return std::move(g_hidden.input);
}

}  // namespace

LossBreakdown loss_and_gradients(const Cvae& model, const Matrix& x, const Matrix& c,
                                 const Matrix& eps, std::vector<nn::LayerGradients>* grads) {
    const auto& cfg = model.config();
    check_cols(x, cfg.data_dim, "loss: data");
    check_cols(c, cfg.condition_dim, "loss: condition");
    check_cols(eps, cfg.latent_dim, "loss: eps");
    if (x.rows() == 0 || c.rows() != x.rows() || eps.rows() != x.rows())
        throw ShapeError("loss: batch sizes of data, condition and eps disagree or are zero");

    const double n = static_cast<double>(x.rows());
    NetPass enc = forward_with_tape(model.encoder(), nn::hconcat(x, c));
    Matrix z = reparameterize(enc.out, eps);
    NetPass dec = forward_with_tape(model.decoder(), nn::hconcat(z, c));

    LossBreakdown loss;
    loss.kl = kl_loss(enc.out);
    loss.recon = recon_loss(x, dec.out);
    loss.total = total_loss(loss.kl, loss.recon, cfg.beta);
    if (!std::isfinite(loss.total)) throw NumericError("loss is not finite");
    if (grads == nullptr) return loss;

    // Reconstruction term w.r.t. decoder outputs.
    Matrix d_mu_dec(x.rows(), cfg.data_dim);
    Matrix d_lv_dec(x.rows(), cfg.data_dim);
    {
        auto xv = x.values();
        auto m = dec.out.mean.values();
        auto lv = dec.out.log_var.values();
        auto dm = d_mu_dec.values();
        auto dl = d_lv_dec.values();
        for (std::size_t i = 0; i < xv.size(); ++i) {
            const double inv_var = std::exp(-lv[i]);
            const double r = m[i] - xv[i];
            dm[i] = r * inv_var / n;
            dl[i] = 0.5 * (1.0 - r * r * inv_var) / n;
        }
    }
    std::vector<nn::LayerGradients> dec_grads;
    Matrix d_dec_in = backward_net(model.decoder(), dec, d_mu_dec, std::move(d_lv_dec), dec_grads);

    // Through z = mu + eps * exp(lv / 2), plus the KL term.
    Matrix d_mu_enc(x.rows(), cfg.latent_dim);
    Matrix d_lv_enc(x.rows(), cfg.latent_dim);
    {
        const double beta = cfg.beta;
        auto m = enc.out.mean.values();
        auto lv = enc.out.log_var.values();
        auto e = eps.values();
        auto dm = d_mu_enc.values();
        auto dl = d_lv_enc.values();
        for (std::size_t r = 0; r < x.rows(); ++r) {
            auto dz = d_dec_in.row(r);
            for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
                const std::size_t i = r * cfg.latent_dim + j;
                const double sigma = std::exp(0.5 * lv[i]);
                dm[i] = dz[j] + beta * m[i] / n;
                dl[i] = dz[j] * e[i] * 0.5 * sigma + beta * 0.5 * (std::exp(lv[i]) - 1.0) / n;
            }
        }
    }
    std::vector<nn::LayerGradients> enc_grads;
    backward_net(model.encoder(), enc, d_mu_enc, std::move(d_lv_enc), enc_grads);

    grads->clear();
    grads->reserve(enc_grads.size() + dec_grads.size());
    for (auto& g : enc_grads) grads->push_back(std::move(g));
    for (auto& g : dec_grads) grads->push_back(std::move(g));
    return loss;
}

}  // namespace loadgen::cvae
