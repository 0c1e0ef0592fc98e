#include "loadgen/nn/adam.hpp"

#include <cmath>
#include <string>

#include "loadgen/errors.hpp"

namespace loadgen::nn {

AdamState AdamState::for_sizes(std::span<const std::size_t> sizes, const AdamHyper& hyper) {
    if (!(hyper.learning_rate > 0.0)) throw DataError("Adam: learning rate must be positive");
    if (!(hyper.beta1 > 0.0 && hyper.beta1 < 1.0) || !(hyper.beta2 > 0.0 && hyper.beta2 < 1.0))
        throw DataError("Adam: decay rates must lie in (0, 1)");
    if (!(hyper.epsilon > 0.0)) throw DataError("Adam: epsilon must be positive");
    AdamState s;
    s.hyper = hyper;
    for (std::size_t n : sizes) {
        s.m.emplace_back(n, 0.0);
        s.v.emplace_back(n, 0.0);
    }
    return s;
}

AdamState AdamState::for_params(std::span<const std::span<double>> params, const AdamHyper& hyper) {
    std::vector<std::size_t> sizes;
    sizes.reserve(params.size());
    for (const auto& p : params) sizes.push_back(p.size());
    return for_sizes(sizes, hyper);
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameter arrays, " +
                         std::to_string(grads.size()) + " gradient arrays, state for " +
                         std::to_string(state.m.size()));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k].size() != grads[k].size() || params[k].size() != state.m[k].size()) {
            throw ShapeError("adam_step: size mismatch in array " + std::to_string(k));
        }
    }

    const auto& h = state.hyper;
    const double t = static_cast<double>(state.step + 1);
    const double correction1 = 1.0 - std::pow(h.beta1, t);
    const double correction2 = 1.0 - std::pow(h.beta2, t);

    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k];
        auto g = grads[k];
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
            v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
        }
    }
    state.step += 1;
}

}  // namespace loadgen::nn
