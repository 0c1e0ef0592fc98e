#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadgen/eval/sample_set.hpp"
#include "loadgen/nn/matrix.hpp"

namespace loadgen::eval {

struct KMeansResult {
    nn::Matrix centroids;                // k x d
    std::vector<std::size_t> assignment;  // final Lloyd assignment of every row
    std::size_t iterations = 0;
    bool converged = false;
};

/// Index of the nearest centroid (squared Euclidean; ties go to the lower index).
std::vector<std::size_t> assign_nearest(const nn::Matrix& x, const nn::Matrix& centroids);

/// k-means++ seeding followed by Lloyd iterations until the assignment stops changing
/// or `max_iterations` is reached. A cluster that empties is re-seeded with the point
/// farthest from its current centroid. Throws DataError if x has fewer than k rows.
KMeansResult kmeans_fit(const nn::Matrix& x, std::size_t k, std::uint64_t seed,
                        std::size_t max_iterations = 300);

struct ClusterSetStats {
    std::string label;
    std::vector<std::size_t> counts;  // per cluster
    nn::Matrix means;                 // k x d; rows of empty clusters are zero
};

/// Clusters re-indexed by decreasing size in the first set (ties by original index).
struct ClusterReport {
    nn::Matrix centroids;
    std::vector<std::size_t> original_index;
    std::vector<ClusterSetStats> sets;
};

/// Assigns every set to its nearest centroid and reports per-cluster counts and mean
/// profiles. The first set (normally the training set) determines the cluster order.
ClusterReport cluster_compare(const nn::Matrix& centroids, std::span<const SampleSet> sets);

}  // namespace loadgen::eval
