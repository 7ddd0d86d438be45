#include "fnmf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

#include "fnmf/errors.hpp"
#include "text.hpp"

namespace fnmf {

SimilarityGraph::SimilarityGraph(std::vector<std::vector<Neighbor>> rows, int neighborhood_size)
    : rows_(std::move(rows)), neighborhood_size_(neighborhood_size) {
    const auto n = size();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto& nb : row(i)) {
            if (nb.index == i) throw DomainError("similarity graph has a self loop");
            if (nb.index < 0 || nb.index >= n) throw DomainError("similarity graph neighbour out of range");
            if (!(nb.weight >= 0.0) || !std::isfinite(nb.weight))
                throw DomainError("similarity graph weights must be finite and nonnegative");
        }
    }
}

Eigen::SparseMatrix<double> SimilarityGraph::weights() const {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < size(); ++i)
        for (const auto& nb : row(i)) triplets.emplace_back(i, nb.index, nb.weight);
    Eigen::SparseMatrix<double> S(size(), size());
    S.setFromTriplets(triplets.begin(), triplets.end());
    return S;
}

double Laplacian::quadratic_form(const Eigen::MatrixXd& V) const {
    const Eigen::MatrixXd LV = degree.asDiagonal() * V - adjacency * V;
    return (V.array() * LV.array()).sum();
}

namespace graph {

SimilarityGraph build_adaptive_knn_graph(const Eigen::MatrixXd& X, int K) {
    const Eigen::Index n = X.cols();
    if (K < 1 || K > n - 2)
        throw DomainError("neighbourhood size must satisfy 1 <= K <= n - 2 (K = " + std::to_string(K) +
                          ", n = " + std::to_string(n) + ")");

    const auto kept = static_cast<std::size_t>(K) + 1;
    std::vector<std::vector<Neighbor>> rows(static_cast<std::size_t>(n));
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<std::size_t>(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        dist.clear();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) dist.emplace_back((X.col(i) - X.col(j)).squaredNorm(), j);
        // pair ordering breaks distance ties on the lower index
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kept), dist.end());

        const double far = dist[static_cast<std::size_t>(K)].first;
        double near_sum = 0.0;
        for (int h = 0; h < K; ++h) near_sum += dist[static_cast<std::size_t>(h)].first;
        const double denom = K * far - near_sum;

        auto& row = rows[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(K));
        for (int h = 0; h < K; ++h) {
            const auto& [d, j] = dist[static_cast<std::size_t>(h)];
            const double w = denom > 0.0 ? (far - d) / denom : 1.0 / K;
            if (w > 0.0) row.push_back({j, w});
        }
    }
    return SimilarityGraph(std::move(rows), K);
}

Laplacian laplacian(const SimilarityGraph& S) {
    const Eigen::SparseMatrix<double> W = S.weights();
    Laplacian L;
    L.adjacency = 0.5 * (W + Eigen::SparseMatrix<double>(W.transpose()));
    L.adjacency.makeCompressed();
    L.degree = L.adjacency * Eigen::VectorXd::Ones(S.size());

    Eigen::SparseMatrix<double> D(S.size(), S.size());
    D.reserve(Eigen::VectorXi::Constant(S.size(), 1));
    for (Eigen::Index i = 0; i < S.size(); ++i) D.insert(i, i) = L.degree(i);
    L.matrix = D - L.adjacency;
    L.matrix.makeCompressed();
    return L;
}

SimilarityGraph empty_graph(Eigen::Index n) {
    return SimilarityGraph(std::vector<std::vector<Neighbor>>(static_cast<std::size_t>(n)), 0);
}

void write_edge_list(const SimilarityGraph& S, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "i,j,weight\n";
    for (Eigen::Index i = 0; i < S.size(); ++i)
        for (const auto& nb : S.row(i)) out << i << ',' << nb.index << ',' << detail::format_double(nb.weight) << '\n';
}

} // namespace graph
} // namespace fnmf
