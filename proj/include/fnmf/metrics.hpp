#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fnmf::metrics {

struct KMeansResult {
    std::vector<int> assignments;
    Eigen::MatrixXd centroids; // c x dims
    double wcss = 0.0;
};

/// Lloyd's algorithm on the rows of `points` with k-means++ seeding, best of
/// `restarts` runs by within-cluster sum of squares. Ties go to the lowest
/// centroid index; an emptied cluster is re-seeded from the point farthest
/// from its current centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int c, int restarts, std::uint64_t seed,
                    int max_iters = 300);

/// Optimal assignment on a square cost matrix (minimization). Returns, for
/// each row, the column it is matched to.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// Contingency counts: rows are predicted labels, columns true labels, both
/// remapped to 0..k-1 in order of first appearance.
Eigen::MatrixXd contingency(std::span<const int> pred, std::span<const int> truth);

/// Fraction of samples matched under the best injective relabeling of `pred`.
double accuracy(std::span<const int> pred, std::span<const int> truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)). Two single-cluster partitions score
/// 1; a single-cluster partition against a non-trivial one scores 0.
double nmi(std::span<const int> pred, std::span<const int> truth);

} // namespace fnmf::metrics
