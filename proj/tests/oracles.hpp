// Slow, obviously-correct reference implementations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fnmf/fnmf.hpp"
#include "fnmf/graph.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Separable convex cost f_k(t) summed over coordinates.
using Coordinate = std::function<double(Eigen::Index k, double t)>;

struct GridMin {
    VectorXd point;
    double value = 0.0;
};

// Minimizes sum_k f_k(theta_k) over the simplex restricted to multiples of
// 1/steps. Hands out one grid unit at a time to the cheapest marginal
// increase; for separable convex f this is the exact grid minimizer.
inline GridMin greedy_grid(Eigen::Index d, const Coordinate& f, int steps = 1000) {
    std::vector<int> units(static_cast<std::size_t>(d), 0);
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        Eigen::Index best = 0;
        double best_gain = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < d; ++k) {
            const double t = units[static_cast<std::size_t>(k)] * h;
            const double gain = f(k, t + h) - f(k, t);
            if (gain < best_gain) {
                best_gain = gain;
                best = k;
            }
        }
        ++units[static_cast<std::size_t>(best)];
    }
    GridMin out;
    out.point.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        out.point(k) = units[static_cast<std::size_t>(k)] * h;
        out.value += f(k, out.point(k));
    }
    return out;
}

// Exhaustive scan of the same grid, d <= 3.
inline GridMin exhaustive_grid(Eigen::Index d, const Coordinate& f, int steps = 1000) {
    GridMin best;
    best.value = std::numeric_limits<double>::infinity();
    const double h = 1.0 / steps;
    auto consider = [&](const VectorXd& t) {
        double v = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) v += f(k, t(k));
        if (v < best.value) {
            best.value = v;
            best.point = t;
        }
    };
    VectorXd t(d);
    if (d == 1) {
        t << 1.0;
        consider(t);
    } else if (d == 2) {
        for (int i = 0; i <= steps; ++i) {
            t << i * h, (steps - i) * h;
            consider(t);
        }
    } else {
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; i + j <= steps; ++j) {
                t << i * h, j * h, (steps - i - j) * h;
                consider(t);
            }
    }
    return best;
}

inline Coordinate qp_cost(const VectorXd& a, const VectorXd& b) {
    return [a, b](Eigen::Index k, double t) { return a(k) * t * t + b(k) * t; };
}

// Best fraction of matches over all injective maps from predicted labels to
// true labels (a predicted label may also stay unmatched).
inline double brute_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::vector<int> plabels(pred.begin(), pred.end());
    std::sort(plabels.begin(), plabels.end());
    plabels.erase(std::unique(plabels.begin(), plabels.end()), plabels.end());
    std::vector<int> tlabels(truth.begin(), truth.end());
    std::sort(tlabels.begin(), tlabels.end());
    tlabels.erase(std::unique(tlabels.begin(), tlabels.end()), tlabels.end());

    std::map<int, int> mapping;
    std::vector<char> taken(tlabels.size(), 0);
    int best = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
        if (idx == plabels.size()) {
            int hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                auto it = mapping.find(pred[i]);
                if (it != mapping.end() && it->second == truth[i]) ++hits;
            }
            best = std::max(best, hits);
            return;
        }
        rec(idx + 1); // unmatched
        for (std::size_t t = 0; t < tlabels.size(); ++t) {
            if (taken[t]) continue;
            taken[t] = 1;
            mapping[plabels[idx]] = tlabels[t];
            rec(idx + 1);
            mapping.erase(plabels[idx]);
            taken[t] = 0;
        }
    };
    rec(0);
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

// NMI straight from pair counts.
inline double hand_nmi(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<int, double> ca, cb;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1;
        cb[b[i]] += 1;
        joint[{a[i], b[i]}] += 1;
    }
    double ha = 0, hb = 0, mi = 0;
    for (auto& [k, c] : ca) ha -= c / n * std::log(c / n);
    for (auto& [k, c] : cb) hb -= c / n * std::log(c / n);
    if (ca.size() == 1 && cb.size() == 1) return 1.0;
    if (ca.size() == 1 || cb.size() == 1) return 0.0;
    for (auto& [k, c] : joint) mi += c / n * std::log((c / n) / ((ca[k.first] / n) * (cb[k.second] / n)));
    return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

// Adaptive-neighbour graph by sorting every row in full.
inline MatrixXd brute_graph(const MatrixXd& X, int K) {
    const Eigen::Index n = X.cols();
    MatrixXd S = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<std::pair<double, Eigen::Index>> dist;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) dist.emplace_back((X.col(i) - X.col(j)).squaredNorm(), j);
        std::sort(dist.begin(), dist.end());
        const double dk1 = dist[static_cast<std::size_t>(K)].first;
        double sum = 0;
        for (int h = 0; h < K; ++h) sum += dist[static_cast<std::size_t>(h)].first;
        const double denom = K * dk1 - sum;
        for (int h = 0; h < K; ++h) {
            const auto j = dist[static_cast<std::size_t>(h)].second;
            S(i, j) = denom > 0 ? (dk1 - dist[static_cast<std::size_t>(h)].first) / denom : 1.0 / K;
        }
    }
    return S;
}

// The full model objective evaluated element by element.
inline double naive_objective(const MatrixXd& X, const MatrixXd& Ssym, const fnmf::FnmfState& s,
                              double lambda, double beta) {
    const auto d = X.rows(), n = X.cols(), c = s.U.cols(), m = s.Theta.cols();
    double total = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            double e = 0;
            for (Eigen::Index k = 0; k < d; ++k) {
                double rec = 0;
                for (Eigen::Index q = 0; q < c; ++q) rec += s.U(k, q) * s.V(i, q);
                const double r = s.Theta(k, j) * X(k, i) - rec;
                e += r * r;
            }
            total += s.P(i, j) * s.P(i, j) * e;
        }
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index l = j + 1; l < m; ++l)
            for (Eigen::Index k = 0; k < d; ++k) total += lambda * s.Theta(k, j) * s.Theta(k, l);
    double graph = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index r = 0; r < n; ++r)
            if (i != r) graph += Ssym(i, r) * (s.V.row(i) - s.V.row(r)).squaredNorm();
    return total + beta * 0.5 * graph;
}

// Random nonnegative data with a few exact zeros.
inline MatrixXd random_data(Eigen::Index d, Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd X(d, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < d; ++i) X(i, j) = u(rng) < 0.05 ? 0.0 : u(rng);
    return X;
}

} // namespace oracle
