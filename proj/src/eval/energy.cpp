#include "loadgen/eval/energy.hpp"

#include <cmath>
#include <numeric>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::eval {

using nn::Matrix;

namespace {

double distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return std::sqrt(s);
}

double mean_cross(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) s += distance(a.row(i), b.row(j));
    return s / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

double mean_within(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.rows(); ++j) s += distance(a.row(i), a.row(j));
    const double n = static_cast<double>(a.rows());
    return s / (n * (n - 1.0) / 2.0);
}

std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

double energy_distance_full(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("energy_distance: " + a.shape_string() + " vs " + b.shape_string());
    if (a.rows() < 2 || b.rows() < 2) throw DataError("energy_distance: each set needs at least two rows");
    return 2.0 * mean_cross(a, b) - mean_within(a) - mean_within(b);
}

EnergyReport energy_distance(const Matrix& a, const Matrix& b, std::size_t subsample,
                             std::size_t repeats, std::uint64_t seed) {
    if (subsample < 2) throw DataError("energy_distance: subsample size must be at least 2");
    if (subsample > a.rows() || subsample > b.rows())
        throw DataError("energy_distance: subsample size " + std::to_string(subsample) +
                        " exceeds a set size (" + std::to_string(a.rows()) + ", " + std::to_string(b.rows()) + ")");
    if (repeats == 0) throw DataError("energy_distance: at least one repeat is required");
    EnergyReport r;
    r.subsample = subsample;
    r.repeats = repeats;
    for (std::size_t k = 0; k < repeats; ++k) {
        Rng rng(stream_seed(seed, k));
        const auto ia = draw_without_replacement(a.rows(), subsample, rng);
        const auto ib = draw_without_replacement(b.rows(), subsample, rng);
        r.per_repeat.push_back(energy_distance_full(nn::gather_rows(a, ia), nn::gather_rows(b, ib)));
    }
    const double n = static_cast<double>(repeats);
    r.estimate = std::accumulate(r.per_repeat.begin(), r.per_repeat.end(), 0.0) / n;
    if (repeats > 1) {
        double ss = 0.0;
        for (double v : r.per_repeat) ss += (v - r.estimate) * (v - r.estimate);
        r.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return r;
}

}  // namespace loadgen::eval
