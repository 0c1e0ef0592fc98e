#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadgen/cvae/model.hpp"
#include "loadgen/data/conditions.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::cvae {

/// Standard-normal draws used by one generate() call: row i of `latent` and `noise`
/// come from the i-th independent stream of the seed.
struct GenerationDraws {
    nn::Matrix latent;  // n x latent_dim
    nn::Matrix noise;   // n x data_dim
};

GenerationDraws draw_generation_noise(std::size_t n, std::size_t latent_dim, std::size_t data_dim,
                                      std::uint64_t seed);

/// Decoder-only generation from given latent codes. Returns mu' when `noise` is null,
/// otherwise mu' + noise * sigma'.
nn::Matrix generate_from_latent(const Cvae& model, const nn::Matrix& latent,
                                const nn::Matrix& conditions, const nn::Matrix* noise = nullptr);

/// One profile per condition row: z ~ N(0, I), then mu'(z, c) (+ eps * sigma'(z, c) if
/// `with_noise`). Deterministic per seed; row i depends only on (seed, i, c_i).
nn::Matrix generate(const Cvae& model, const nn::Matrix& conditions, bool with_noise,
                    std::uint64_t seed);
nn::Matrix generate(const Cvae& model, std::span<const data::ConditionVector> conditions,
                    bool with_noise, std::uint64_t seed);

nn::Matrix to_matrix(std::span<const data::ConditionVector> conditions);

/// How many training profiles share a (month, rank) condition.
struct ConditionCount {
    double month = 1.0;
    double rank = 0.0;
    std::size_t count = 0;
};

/// Exactly one condition per training profile, in metadata order.
/// Throws DataError on empty metadata.
std::vector<data::ConditionVector> make_generation_conditions(std::span<const ConditionCount> metadata);

/// Conditions for one size class: every training profile whose rank falls in the class
/// contributes one condition with the same month and a rank drawn uniformly from the
/// class range. Throws DataError if the class has no training profiles.
std::vector<data::ConditionVector> sample_class_conditions(std::span<const ConditionCount> metadata,
                                                           data::SizeClass cls, std::uint64_t seed);

}  // namespace loadgen::cvae
