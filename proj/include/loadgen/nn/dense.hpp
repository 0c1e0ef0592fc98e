#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "loadgen/nn/matrix.hpp"

namespace loadgen::nn {

enum class Activation { ReLU, Identity };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

/// Fully connected layer computing activation(x * W^T + b) row-wise.
struct DenseLayer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::Identity;

    DenseLayer() = default;
    DenseLayer(Matrix w, std::vector<double> b, Activation act);

    std::size_t in_dim() const noexcept { return weights.cols(); }
    std::size_t out_dim() const noexcept { return weights.rows(); }

    bool operator==(const DenseLayer&) const = default;
};

struct LayerGradients {
    Matrix weights;
    std::vector<double> bias;
};

struct StackGradients {
    std::vector<LayerGradients> layers;
    Matrix input;
};

/// Inputs and pre-activations cached by a forward pass, consumed by one backward pass.
class GradientTape {
public:
    void clear();
    std::size_t depth() const noexcept { return inputs_.size(); }
    bool consumed() const noexcept { return consumed_; }

private:
    friend Matrix dense_forward(const DenseLayer&, const Matrix&, GradientTape*);
    friend StackGradients stack_backward(std::span<const DenseLayer>, GradientTape&, const Matrix&);

    std::vector<Matrix> inputs_;
    std::vector<Matrix> preacts_;
    bool consumed_ = false;
};

/// Applies one layer. When `tape` is given, the input and pre-activation are appended to it.
Matrix dense_forward(const DenseLayer& layer, const Matrix& input, GradientTape* tape = nullptr);

/// Applies `layers` in order; an empty stack returns the input unchanged.
Matrix stack_forward(std::span<const DenseLayer> layers, const Matrix& input,
                     GradientTape* tape = nullptr);

/// Back-propagates `upstream` (d loss / d output) through the stack recorded on `tape`.
/// The ReLU derivative at exactly zero is taken as zero. The tape is marked consumed.
StackGradients stack_backward(std::span<const DenseLayer> layers, GradientTape& tape,
                              const Matrix& upstream);

struct LayerShape {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::ReLU;
};

/// He-normal weights N(0, 2 / fan_in), zero biases. Deterministic per seed.
std::vector<DenseLayer> init_params(std::span<const LayerShape> shapes, std::uint64_t seed);

/// Mutable views over every weight and bias array, layer by layer (W then b).
std::vector<std::span<double>> parameter_views(std::span<DenseLayer> layers);
/// Matching views over gradients, same order as parameter_views.
std::vector<std::span<const double>> gradient_views(std::span<const LayerGradients> grads);

}  // namespace loadgen::nn
