#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "loadgen/errors.hpp"
#include "loadgen/nn/adam.hpp"
#include "loadgen/nn/dense.hpp"
#include "loadgen/nn/matrix.hpp"
#include "test_util.hpp"

using namespace loadgen;
using namespace loadgen::nn;

TEST_CASE("matrix products agree with naive loops") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    Matrix a(5, 7), b(7, 4), c(4, 7);
    for (auto* m : {&a, &b, &c})
        for (double& v : m->values()) v = n01(rng);
    const auto ab = matmul(a, b);
    const auto act = matmul_nt(a, c);
    const auto atb = matmul_tn(a, matmul(a, b));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double s = 0, t = 0;
            for (std::size_t k = 0; k < 7; ++k) {
                s += a(i, k) * b(k, j);
                t += a(i, k) * c(j, k);
            }
            CHECK(ab(i, j) == doctest::Approx(s).epsilon(1e-13));
            CHECK(act(i, j) == doctest::Approx(t).epsilon(1e-13));
        }
    const auto ref = matmul(transpose(a), matmul(a, b));
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(atb.values()[i] == doctest::Approx(ref.values()[i]));
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("matrix helpers") {
    Matrix m{{1, 2}, {3, 4}, {5, 6}};
    CHECK(column_sums(m) == std::vector<double>{9, 12});
    CHECK(column_means(m) == std::vector<double>{3, 4});
    const std::size_t idx[] = {2, 0};
    CHECK(gather_rows(m, idx) == Matrix{{5, 6}, {1, 2}});
    CHECK(hconcat(m, Matrix{{7}, {8}, {9}}) == Matrix{{1, 2, 7}, {3, 4, 8}, {5, 6, 9}});
    CHECK(column_block(m, 1, 1) == Matrix{{2}, {4}, {6}});
    CHECK_THROWS_AS(Matrix::from_values(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
    m(0, 0) = std::nan("");
    CHECK_THROWS_AS(require_finite(m, "m"), NumericError);
}

TEST_CASE("dense_forward examples") {
    const Matrix input{{-1, 2}};
    CHECK(dense_forward(DenseLayer(Matrix::identity(2), {0, 0}, Activation::ReLU), input) == Matrix{{0, 2}});
    CHECK(dense_forward(DenseLayer(Matrix::identity(2), {0, 0}, Activation::Identity), input) == Matrix{{-1, 2}});
    CHECK(dense_forward(DenseLayer(Matrix{{1, 1}}, {0.5}, Activation::Identity), Matrix{{2, 3}}) == Matrix{{5.5}});
}

TEST_CASE("dense_forward rejects mismatched input and names both shapes") {
    const DenseLayer layer(Matrix::identity(2), {0, 0}, Activation::ReLU);
    try {
        dense_forward(layer, Matrix(1, 3));
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1x3") != std::string::npos);
        CHECK(msg.find("2x2") != std::string::npos);
    }
    CHECK_THROWS_AS(DenseLayer(Matrix::identity(2), {0}, Activation::ReLU), ShapeError);
}

TEST_CASE("identity layer is affine") {
    auto layers = init_params(std::vector<LayerShape>{{4, 3, Activation::Identity}}, 11);
    layers[0].bias = {0.3, -0.2, 1.0};
    const Matrix x{{1, 2, 3, 4}}, y{{-1, 0.5, 2, 0}};
    const double alpha = 0.3;
    Matrix mix(1, 4);
    for (std::size_t j = 0; j < 4; ++j) mix(0, j) = alpha * x(0, j) + (1 - alpha) * y(0, j);
    const auto fx = dense_forward(layers[0], x), fy = dense_forward(layers[0], y), fm = dense_forward(layers[0], mix);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fm(0, j) - (alpha * fx(0, j) + (1 - alpha) * fy(0, j))) < 1e-10);
}

TEST_CASE("stack_forward composition") {
    const Matrix x{{0.5, -1.5, 2.0}};
    CHECK(stack_forward({}, x) == x);
    const auto layers = init_params(std::vector<LayerShape>{{3, 5, Activation::ReLU}, {5, 2, Activation::Identity}}, 5);
    CHECK(stack_forward(std::span(layers.data(), 1), x) == dense_forward(layers[0], x));
    const auto manual = dense_forward(layers[1], dense_forward(layers[0], x));
    const auto stacked = stack_forward(layers, x);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(manual(0, j) - stacked(0, j)) < 1e-12);
}

TEST_CASE("stack_backward on a single identity layer") {
    const std::vector<DenseLayer> layers{DenseLayer(Matrix{{1, 2}, {3, 4}, {5, 6}}, {0, 0, 0}, Activation::Identity)};
    const Matrix x{{1, -1}, {2, 0.5}};
    const Matrix g{{1, 0, -1}, {0.5, 2, 0}};
    GradientTape tape;
    stack_forward(layers, x, &tape);
    const auto grads = stack_backward(layers, tape, g);
    CHECK(grads.layers[0].weights == matmul_tn(g, x));
    CHECK(grads.input == matmul(g, layers[0].weights));
    CHECK(grads.layers[0].bias == column_sums(g));
    CHECK(tape.consumed());
    CHECK_THROWS(stack_backward(layers, tape, g));
}

TEST_CASE("ReLU with all-negative pre-activations passes no gradient") {
    const std::vector<DenseLayer> layers{DenseLayer(Matrix{{1, 1}, {2, 1}}, {-10, -10}, Activation::ReLU)};
    GradientTape tape;
    stack_forward(layers, Matrix{{1, 2}, {0.5, 0.5}}, &tape);
    const auto grads = stack_backward(layers, tape, Matrix{{1, 1}, {1, 1}});
    for (double v : grads.layers[0].weights.values()) CHECK(v == 0.0);
    for (double v : grads.layers[0].bias) CHECK(v == 0.0);
    for (double v : grads.input.values()) CHECK(v == 0.0);
}

TEST_CASE("ReLU derivative at exactly zero is zero") {
    const std::vector<DenseLayer> layers{DenseLayer(Matrix{{1}}, {0}, Activation::ReLU)};
    GradientTape tape;
    stack_forward(layers, Matrix{{0.0}}, &tape);
    const auto grads = stack_backward(layers, tape, Matrix{{1.0}});
    CHECK(grads.layers[0].bias[0] == 0.0);
}

TEST_CASE("stack_backward matches central finite differences on a 3-layer net") {
    auto layers = init_params(
        std::vector<LayerShape>{{4, 8, Activation::ReLU}, {8, 6, Activation::ReLU}, {6, 3, Activation::Identity}}, 21);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    for (auto& l : layers)
        for (double& b : l.bias) b = 0.1 * n01(rng);
    Matrix x(5, 4), w(5, 3);
    for (double& v : x.values()) v = n01(rng);
    for (double& v : w.values()) v = n01(rng);
    // loss = sum(w .* f(x)), so d loss / d output = w.
    auto loss = [&] {
        const auto y = stack_forward(layers, x);
        double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += y.values()[i] * w.values()[i];
        return s;
    };
    GradientTape tape;
    stack_forward(layers, x, &tape);
    const auto grads = stack_backward(layers, tape, w);
    auto params = parameter_views(layers);
    const auto gviews = gradient_views(grads.layers);
    double worst = 0;
    for (std::size_t p = 0; p < params.size(); ++p)
        for (std::size_t k = 0; k < params[p].size(); ++k)
            worst = std::max(worst, testutil::fd_relative_error(params[p][k], gviews[p][k], loss));
    for (std::size_t k = 0; k < x.size(); ++k)
        worst = std::max(worst, testutil::fd_relative_error(x.values()[k], grads.input.values()[k], loss));
    CHECK(worst < 1e-4);
}

TEST_CASE("init_params is He-normal with zero biases and seed-deterministic") {
    const std::vector<LayerShape> shapes{{800, 150, Activation::ReLU}};
    const auto a = init_params(shapes, 99);
    const auto b = init_params(shapes, 99);
    CHECK(a == b);
    CHECK_FALSE(a == init_params(shapes, 100));
    const auto w = a[0].weights.values();
    REQUIRE(w.size() >= 100000);
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    double var = 0;
    for (double v : w) var += (v - mean) * (v - mean);
    var /= static_cast<double>(w.size() - 1);
    CHECK(std::abs(var - 2.0 / 800.0) < 0.1 * 2.0 / 800.0);
    for (double v : a[0].bias) CHECK(v == 0.0);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    std::vector<double> p{1.0, -2.0, 3.0};
    const std::vector<double> g(3, 0.0);
    std::vector<std::span<double>> params{p};
    std::vector<std::span<const double>> grads{g};
    auto state = AdamState::for_params(params, {});
    for (int i = 0; i < 3; ++i) adam_step(params, grads, state);
    CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
    CHECK(state.step == 3);
}

TEST_CASE("adam: bias-corrected first step moves by the learning rate") {
    for (double g0 : {0.5, -3.0, 1e-3}) {
        std::vector<double> p{0.0};
        std::vector<double> g{g0};
        std::vector<std::span<double>> params{p};
        std::vector<std::span<const double>> grads{g};
        auto state = AdamState::for_params(params, {0.01});
        adam_step(params, grads, state);
        CHECK(p[0] == doctest::Approx(-0.01 * (g0 > 0 ? 1 : -1)).epsilon(1e-4));
    }
}

TEST_CASE("adam: two steps on w^2 decrease w") {
    std::vector<double> w{1.0}, g{0.0};
    std::vector<std::span<double>> params{w};
    std::vector<std::span<const double>> grads{g};
    auto state = AdamState::for_params(params, {0.1});
    double prev = w[0];
    for (int i = 0; i < 2; ++i) {
        g[0] = 2 * w[0];
        adam_step(params, grads, state);
        CHECK(w[0] < prev);
        prev = w[0];
    }
}

TEST_CASE("adam: permuting parameter arrays permutes the updates") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    std::vector<std::vector<double>> p(3), g(3);
    for (std::size_t i = 0; i < 3; ++i) {
        p[i].resize(4 + i);
        g[i].resize(4 + i);
        for (double& v : p[i]) v = n01(rng);
    }
    auto q = p;
    const std::size_t perm[] = {2, 0, 1};
    std::vector<std::span<double>> pa, pb;
    std::vector<std::span<const double>> ga, gb;
    for (std::size_t i = 0; i < 3; ++i) {
        pa.emplace_back(p[i]);
        ga.emplace_back(g[i]);
        pb.emplace_back(q[perm[i]]);
        gb.emplace_back(g[perm[i]]);
    }
    auto sa = AdamState::for_params(pa, {});
    auto sb = AdamState::for_params(pb, {});
    for (int step = 0; step < 5; ++step) {
        for (auto& gi : g)
            for (double& v : gi) v = n01(rng);
        adam_step(pa, ga, sa);
        adam_step(pb, gb, sb);
    }
    CHECK(p == q);
}

TEST_CASE("adam validates hyperparameters and shapes") {
    std::vector<double> p{1.0};
    std::vector<double> g{1.0, 2.0};
    std::vector<std::span<double>> params{p};
    std::vector<std::span<const double>> grads{g};
    CHECK_THROWS(AdamState::for_params(params, {0.0}));
    CHECK_THROWS(AdamState::for_params(params, {1e-3, 1.0}));
    auto state = AdamState::for_params(params, {});
    CHECK_THROWS_AS(adam_step(params, grads, state), ShapeError);
}

TEST_CASE("adam determinism: same data, same parameters after N steps") {
    auto run = [] {
        auto layers = init_params(std::vector<LayerShape>{{3, 4, Activation::ReLU}, {4, 1, Activation::Identity}}, 1);
        auto params = parameter_views(layers);
        auto state = AdamState::for_params(params, {});
        const Matrix x{{1, 2, 3}, {-1, 0, 1}};
        for (int i = 0; i < 10; ++i) {
            GradientTape tape;
            stack_forward(layers, x, &tape);
            const auto g = stack_backward(layers, tape, Matrix{{1}, {-1}});
            adam_step(params, gradient_views(g.layers), state);
        }
        return layers;
    };
    CHECK(run() == run());
}
