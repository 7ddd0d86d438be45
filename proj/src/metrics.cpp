#include "fnmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "fnmf/errors.hpp"

namespace fnmf::metrics {

namespace {

constexpr std::uint64_t kRestartStride = 0x9E3779B97F4A7C15ULL;

Eigen::Index nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x, double& best) {
    Eigen::Index arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        const double d = (centroids.row(k) - x).squaredNorm();
        if (d < best) { // strict: ties stay with the lower index
            best = d;
            arg = k;
        }
    }
    return arg;
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& points, int c, std::mt19937_64& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centroids(c, points.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = points.row(pick(rng));

    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
    for (int k = 1; k < c; ++k) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2(i);
                if (target < 0.0 && d2(i) > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centroids.row(k) = points.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i)
            d2(i) = std::min(d2(i), (points.row(i) - centroids.row(k)).squaredNorm());
    }
    return centroids;
}

KMeansResult lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids, int max_iters) {
    const Eigen::Index n = points.rows();
    const Eigen::Index c = centroids.rows();
    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd dist(n);

    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<int>(nearest(centroids, points.row(i), dist(i)));
            changed |= assign[static_cast<std::size_t>(i)] != k;
            assign[static_cast<std::size_t>(i)] = k;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c, points.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(c);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts(assign[static_cast<std::size_t>(i)]);
        }
        for (Eigen::Index k = 0; k < c; ++k) {
            if (counts(k) > 0) {
                centroids.row(k) = sums.row(k) / counts(k);
                continue;
            }
            // empty cluster: take the point farthest from its own centroid
            Eigen::Index far = 0;
            dist.maxCoeff(&far);
            centroids.row(k) = points.row(far);
            assign[static_cast<std::size_t>(far)] = static_cast<int>(k);
            dist(far) = 0.0;
            changed = true;
        }
        if (!changed) break;
    }

    KMeansResult r;
    r.wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = 0.0;
        assign[static_cast<std::size_t>(i)] = static_cast<int>(nearest(centroids, points.row(i), d));
        r.wcss += d;
    }
    r.assignments = std::move(assign);
    r.centroids = std::move(centroids);
    return r;
}

struct Relabeled {
    std::vector<int> ids;
    int classes = 0;
};

Relabeled relabel(std::span<const int> labels) {
    std::map<int, int> seen;
    Relabeled out;
    out.ids.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = seen.try_emplace(l, out.classes);
        if (inserted) ++out.classes;
        out.ids.push_back(it->second);
    }
    return out;
}

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw DomainError("prediction and truth lengths differ");
    if (pred.empty()) throw DomainError("cannot score an empty labelling");
}

double entropy(const Eigen::VectorXd& counts, double n) {
    double h = 0.0;
    for (Eigen::Index k = 0; k < counts.size(); ++k)
        if (counts(k) > 0.0) h -= counts(k) / n * std::log(counts(k) / n);
    return h;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int c, int restarts, std::uint64_t seed, int max_iters) {
    if (c < 1 || c > points.rows()) throw DomainError("k-means needs 1 <= c <= n");
    if (restarts < 1) throw DomainError("k-means needs at least one restart");
    if (!points.allFinite()) throw DomainError("k-means input has non-finite values");

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + kRestartStride * static_cast<std::uint64_t>(r + 1));
        auto result = lloyd(points, plus_plus_seeds(points, c, rng), max_iters);
        if (result.wcss < best.wcss) best = std::move(result);
    }
    return best;
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw DomainError("assignment cost matrix must be square");
    const auto n = static_cast<int>(cost.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    // potentials u (rows), v (columns); way/match indexed from 1 with 0 as a sentinel
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) row_to_col[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    return row_to_col;
}

Eigen::MatrixXd contingency(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred, truth);
    const auto p = relabel(pred);
    const auto t = relabel(truth);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p.classes, t.classes);
    for (std::size_t i = 0; i < pred.size(); ++i) C(p.ids[i], t.ids[i]) += 1.0;
    return C;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    const Eigen::MatrixXd C = contingency(pred, truth);
    const Eigen::Index k = std::max(C.rows(), C.cols());
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(k, k);
    padded.topLeftCorner(C.rows(), C.cols()) = C;
    const auto match = hungarian(-padded);
    double hits = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) hits += padded(r, match[static_cast<std::size_t>(r)]);
    return hits / static_cast<double>(pred.size());
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const Eigen::MatrixXd C = contingency(pred, truth);
    const auto n = static_cast<double>(pred.size());
    const Eigen::VectorXd rows = C.rowwise().sum();
    const Eigen::VectorXd cols = C.colwise().sum().transpose();
    const double hp = entropy(rows, n);
    const double ht = entropy(cols, n);
    if (hp == 0.0 && ht == 0.0) return 1.0;
    if (hp == 0.0 || ht == 0.0) return 0.0;

    // identical up to relabeling: one nonzero per row and per column
    if (C.rows() == C.cols() && ((C.array() > 0.0).rowwise().count() == 1).all() &&
        ((C.array() > 0.0).colwise().count() == 1).all())
        return 1.0;

    double mi = 0.0;
    for (Eigen::Index r = 0; r < C.rows(); ++r)
        for (Eigen::Index c = 0; c < C.cols(); ++c)
            if (C(r, c) > 0.0) mi += C(r, c) / n * std::log(C(r, c) * n / (rows(r) * cols(c)));
    return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

} // namespace fnmf::metrics
