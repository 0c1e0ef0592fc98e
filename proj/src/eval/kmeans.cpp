#include "loadgen/eval/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::eval {

using nn::Matrix;

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

std::size_t nearest(std::span<const double> x, const Matrix& centroids, double* best_out = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(x, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (best_out != nullptr) *best_out = best_d;
    return best;
}

Matrix plus_plus_seeding(const Matrix& x, std::size_t k, Rng& rng) {
    const auto n = x.rows();
    Matrix centroids(k, x.cols());
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    auto copy_row = [&](std::size_t dst, std::size_t src) {
        std::copy(x.row(src).begin(), x.row(src).end(), centroids.row(dst).begin());
    };
    copy_row(0, first(rng));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), centroids.row(0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = u01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        }
        copy_row(c, pick);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], squared_distance(x.row(i), centroids.row(c)));
    }
    return centroids;
}

}  // namespace

std::vector<std::size_t> assign_nearest(const Matrix& x, const Matrix& centroids) {
    if (x.cols() != centroids.cols())
        throw ShapeError("assign_nearest: " + x.shape_string() + " vs centroids " + centroids.shape_string());
    if (centroids.rows() == 0) throw DataError("assign_nearest: no centroids");
    std::vector<std::size_t> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = nearest(x.row(i), centroids);
    return out;
}

KMeansResult kmeans_fit(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
    if (k == 0) throw DataError("kmeans_fit: k must be at least 1");
    if (x.rows() < k)
        throw DataError("kmeans_fit: " + std::to_string(x.rows()) + " profiles are fewer than k = " + std::to_string(k));
    Rng rng(seed);
    KMeansResult r;
    r.centroids = plus_plus_seeding(x, k, rng);
    r.assignment = assign_nearest(x, r.centroids);
    const auto d = x.cols();

    for (r.iterations = 0; r.iterations < max_iterations;) {
        ++r.iterations;
        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto dst = sums.row(r.assignment[i]);
            auto src = x.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            ++counts[r.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            auto dst = r.centroids.row(c);
            auto src = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] / static_cast<double>(counts[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            // Re-seed from the point farthest from its own centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const double dist = squared_distance(x.row(i), r.centroids.row(r.assignment[i]));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            std::copy(x.row(far).begin(), x.row(far).end(), r.centroids.row(c).begin());
            r.assignment[far] = c;
        }
        auto next = assign_nearest(x, r.centroids);
        if (next == r.assignment) {
            r.converged = true;
            break;
        }
        r.assignment = std::move(next);
    }
    return r;
}

ClusterReport cluster_compare(const Matrix& centroids, std::span<const SampleSet> sets) {
    if (sets.empty()) throw DataError("cluster_compare: no sample sets");
    const auto k = centroids.rows();
    const auto d = centroids.cols();

    std::vector<ClusterSetStats> raw;
    for (const auto& s : sets) {
        ClusterSetStats st{s.label, std::vector<std::size_t>(k, 0), Matrix(k, d)};
        const auto assignment = assign_nearest(s.profiles, centroids);
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            auto dst = st.means.row(assignment[i]);
            auto src = s.profiles.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            ++st.counts[assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (st.counts[c] > 0)
                for (double& v : st.means.row(c)) v /= static_cast<double>(st.counts[c]);
        raw.push_back(std::move(st));
    }

    ClusterReport report;
    report.original_index.resize(k);
    std::iota(report.original_index.begin(), report.original_index.end(), std::size_t{0});
    const auto& lead = raw.front().counts;
    std::stable_sort(report.original_index.begin(), report.original_index.end(),
                     [&](std::size_t a, std::size_t b) { return lead[a] > lead[b]; });
    report.centroids = nn::gather_rows(centroids, report.original_index);
    for (auto& st : raw) {
        ClusterSetStats ordered{st.label, {}, nn::gather_rows(st.means, report.original_index)};
        for (auto c : report.original_index) ordered.counts.push_back(st.counts[c]);
        report.sets.push_back(std::move(ordered));
    }
    return report;
}

}  // namespace loadgen::eval
