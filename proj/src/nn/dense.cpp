#include "loadgen/nn/dense.hpp"

#include <random>
#include <string>

#include "loadgen/errors.hpp"

namespace loadgen::nn {

std::string_view to_string(Activation a) {
    return a == Activation::ReLU ? "relu" : "identity";
}

Activation activation_from_string(std::string_view s) {
    if (s == "relu") return Activation::ReLU;
    if (s == "identity") return Activation::Identity;
    throw FormatError("unknown activation '" + std::string(s) + "'");
}

DenseLayer::DenseLayer(Matrix w, std::vector<double> b, Activation act)
    : weights(std::move(w)), bias(std::move(b)), activation(act) {
    if (bias.size() != weights.rows()) {
        throw ShapeError("DenseLayer: bias length " + std::to_string(bias.size()) +
                         " does not match weights " + weights.shape_string());
    }
}

void GradientTape::clear() {
    inputs_.clear();
    preacts_.clear();
    consumed_ = false;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input, GradientTape* tape) {
    if (input.cols() != layer.in_dim()) {
        throw ShapeError("dense_forward: input " + input.shape_string() + " vs weights " +
                         layer.weights.shape_string());
    }
    Matrix pre = matmul_nt(input, layer.weights);
    for (std::size_t r = 0; r < pre.rows(); ++r) {
        auto row = pre.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    require_finite(pre, "dense_forward");
    Matrix out = pre;
    if (layer.activation == Activation::ReLU) {
        for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    }
    if (tape != nullptr) {
        if (tape->consumed_) tape->clear();
        tape->inputs_.push_back(input);
        tape->preacts_.push_back(std::move(pre));
    }
    return out;
}

Matrix stack_forward(std::span<const DenseLayer> layers, const Matrix& input, GradientTape* tape) {
    for (std::size_t i = 1; i < layers.size(); ++i) {
        if (layers[i].in_dim() != layers[i - 1].out_dim()) {
            throw ShapeError("stack_forward: layer " + std::to_string(i - 1) + " " +
                             layers[i - 1].weights.shape_string() + " does not chain into layer " +
                             std::to_string(i) + " " + layers[i].weights.shape_string());
        }
    }
    if (tape != nullptr) tape->clear();
    Matrix x = input;
    for (const auto& layer : layers) x = dense_forward(layer, x, tape);
    return x;
}

StackGradients stack_backward(std::span<const DenseLayer> layers, GradientTape& tape,
                              const Matrix& upstream) {
    if (tape.consumed_) throw ShapeError("stack_backward: tape already consumed");
    if (tape.depth() != layers.size()) {
        throw ShapeError("stack_backward: tape holds " + std::to_string(tape.depth()) +
                         " layers, stack has " + std::to_string(layers.size()));
    }
    StackGradients out;
    out.layers.resize(layers.size());
    Matrix grad = upstream;
    for (std::size_t k = layers.size(); k-- > 0;) {
        const auto& layer = layers[k];
        const Matrix& pre = tape.preacts_[k];
        if (grad.rows() != pre.rows() || grad.cols() != pre.cols()) {
            throw ShapeError("stack_backward: upstream " + grad.shape_string() +
                             " vs layer output " + pre.shape_string());
        }
        if (layer.activation == Activation::ReLU) {
            auto g = grad.values();
            auto p = pre.values();
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!(p[i] > 0.0)) g[i] = 0.0;
        }
        out.layers[k].weights = matmul_tn(grad, tape.inputs_[k]);
        out.layers[k].bias = column_sums(grad);
        grad = matmul(grad, layer.weights);
    }
    out.input = std::move(grad);
    tape.consumed_ = true;
    return out;
}

std::vector<DenseLayer> init_params(std::span<const LayerShape> shapes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<DenseLayer> layers;
    layers.reserve(shapes.size());
    for (const auto& s : shapes) {
        if (s.in == 0 || s.out == 0) throw ShapeError("init_params: zero-sized layer");
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(s.in)));
        Matrix w(s.out, s.in);
        for (double& v : w.values()) v = normal(rng);
        layers.emplace_back(std::move(w), std::vector<double>(s.out, 0.0), s.activation);
    }
    return layers;
}

std::vector<std::span<double>> parameter_views(std::span<DenseLayer> layers) {
    std::vector<std::span<double>> views;
    views.reserve(layers.size() * 2);
    for (auto& l : layers) {
        views.push_back(l.weights.values());
        views.push_back(l.bias);
    }
    return views;
}

std::vector<std::span<const double>> gradient_views(std::span<const LayerGradients> grads) {
    std::vector<std::span<const double>> views;
    views.reserve(grads.size() * 2);
    for (const auto& g : grads) {
        views.push_back(g.weights.values());
        views.push_back(g.bias);
    }
    return views;
}

}  // namespace loadgen::nn
