#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fnmf/datasets.hpp"

namespace fnmf {

struct Neighbor {
    Eigen::Index index;
    double weight;
};

/// Row-stochastic K-nearest-neighbour graph with a zero diagonal. Row i lists
/// the neighbours of sample i in increasing distance order.
class SimilarityGraph {
public:
    SimilarityGraph() = default;
    /// Throws DomainError if a row references itself, is out of range, or has a
    /// negative weight.
    SimilarityGraph(std::vector<std::vector<Neighbor>> rows, int neighborhood_size);

    Eigen::Index size() const { return static_cast<Eigen::Index>(rows_.size()); }
    int neighborhood_size() const { return neighborhood_size_; }
    const std::vector<Neighbor>& row(Eigen::Index i) const { return rows_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<Neighbor>>& rows() const { return rows_; }

    /// S as a sparse n x n matrix (not symmetrized).
    Eigen::SparseMatrix<double> weights() const;

private:
    std::vector<std::vector<Neighbor>> rows_;
    int neighborhood_size_ = 0;
};

/// L = D - S_sym with S_sym = (S + S^T) / 2. The symmetrized adjacency and the
/// degree vector are kept alongside because the V update needs them separately.
struct Laplacian {
    Eigen::SparseMatrix<double> matrix;
    Eigen::SparseMatrix<double> adjacency;
    Eigen::VectorXd degree;

    Eigen::Index size() const { return matrix.rows(); }

    /// Tr(V^T L V) without materializing L V densely.
    double quadratic_form(const Eigen::MatrixXd& V) const;
};

namespace graph {

/// Adaptive-neighbour weights on squared Euclidean distances between columns of X.
/// Neighbour j (1-based rank, j <= K) of sample i receives
///   (d_{K+1} - d_j) / (K d_{K+1} - sum_{h<=K} d_h),
/// and a zero denominator yields a uniform 1/K row. Distance ties break on the
/// lower sample index. Requires 1 <= K <= n - 2.
SimilarityGraph build_adaptive_knn_graph(const Eigen::MatrixXd& X, int K);

inline SimilarityGraph build_adaptive_knn_graph(const DataMatrix& X, int K) {
    return build_adaptive_knn_graph(X.values, K);
}

Laplacian laplacian(const SimilarityGraph& S);

/// An edgeless graph over n samples; makes the graph term vanish.
SimilarityGraph empty_graph(Eigen::Index n);

/// Edge list CSV with header "i,j,weight", one line per stored weight.
void write_edge_list(const SimilarityGraph& S, const std::filesystem::path& path);

} // namespace graph
} // namespace fnmf
