#include "loadgen/cvae/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::cvae {

using nn::Matrix;

namespace {
constexpr std::size_t kDecodeChunk = 2048;
}

GenerationDraws draw_generation_noise(std::size_t n, std::size_t latent_dim, std::size_t data_dim,
                                      std::uint64_t seed) {
    GenerationDraws d{Matrix(n, latent_dim), Matrix(n, data_dim)};
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(stream_seed(seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : d.latent.row(i)) v = normal(rng);
        for (double& v : d.noise.row(i)) v = normal(rng);
    }
    return d;
}

Matrix generate_from_latent(const Cvae& model, const Matrix& latent, const Matrix& conditions,
                            const Matrix* noise) {
    const auto& cfg = model.config();
    if (latent.rows() != conditions.rows())
        throw ShapeError("generate: latent and condition row counts differ");
    if (noise != nullptr && (noise->rows() != latent.rows() || noise->cols() != cfg.data_dim))
        throw ShapeError("generate: noise has shape " + noise->shape_string());

    const auto n = latent.rows();
    Matrix out(n, cfg.data_dim);
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < n; start += kDecodeChunk) {
        const auto count = std::min(kDecodeChunk, n - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        auto p = model.decode(nn::gather_rows(latent, idx), nn::gather_rows(conditions, idx));
        for (std::size_t r = 0; r < count; ++r) {
            auto dst = out.row(start + r);
            auto mu = p.mean.row(r);
            auto lv = p.log_var.row(r);
            for (std::size_t j = 0; j < cfg.data_dim; ++j) {
                dst[j] = mu[j];
                if (noise != nullptr) dst[j] += (*noise)(start + r, j) * std::exp(0.5 * lv[j]);
            }
        }
    }
    return out;
}

Matrix generate(const Cvae& model, const Matrix& conditions, bool with_noise, std::uint64_t seed) {
    const auto& cfg = model.config();
    if (conditions.cols() != cfg.condition_dim)
        throw ShapeError("generate: conditions have " + conditions.shape_string() + ", expected " +
                         std::to_string(cfg.condition_dim) + " columns");
    if (conditions.rows() == 0) throw DataError("generate: no conditions given");
    auto draws = draw_generation_noise(conditions.rows(), cfg.latent_dim, cfg.data_dim, seed);
    return generate_from_latent(model, draws.latent, conditions, with_noise ? &draws.noise : nullptr);
}

Matrix to_matrix(std::span<const data::ConditionVector> conditions) {
    Matrix m(conditions.size(), data::ConditionVector::kDim);
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        auto a = conditions[i].as_array();
        std::copy(a.begin(), a.end(), m.row(i).begin());
    }
    return m;
}

Matrix generate(const Cvae& model, std::span<const data::ConditionVector> conditions,
                bool with_noise, std::uint64_t seed) {
    return generate(model, to_matrix(conditions), with_noise, seed);
}

std::vector<data::ConditionVector> make_generation_conditions(std::span<const ConditionCount> metadata) {
    std::vector<data::ConditionVector> out;
    for (const auto& m : metadata) {
        const auto c = data::make_condition(m.month, m.rank);
        out.insert(out.end(), m.count, c);
    }
    if (out.empty()) throw DataError("make_generation_conditions: empty training metadata");
    return out;
}

std::vector<data::ConditionVector> sample_class_conditions(std::span<const ConditionCount> metadata,
                                                           data::SizeClass cls, std::uint64_t seed) {
    const auto [lo, hi] = data::rank_range(cls);
    Rng rng(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    std::vector<data::ConditionVector> out;
    for (const auto& m : metadata) {
        if (data::size_class_of(m.rank) != cls) continue;
        for (std::size_t k = 0; k < m.count; ++k)
            out.push_back(data::make_condition(m.month, std::clamp(uniform(rng), lo, hi)));
    }
    if (out.empty())
        throw DataError("sample_class_conditions: no training profiles in class " +
                        std::string(data::to_string(cls)));
    return out;
}

}  // namespace loadgen::cvae
