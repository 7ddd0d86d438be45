#include "fnmf/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fnmf/errors.hpp"

namespace fnmf::simplex {

double SeparableSimplexQP::objective(const Eigen::VectorXd& theta) const {
    return (a.array() * theta.array().square() + b.array() * theta.array()).sum();
}

namespace {

void validate(const SeparableSimplexQP& qp) {
    if (qp.a.size() < 1 || qp.a.size() != qp.b.size())
        throw DomainError("simplex QP needs equal-length, non-empty coefficient vectors");
    if (!qp.a.allFinite() || !qp.b.allFinite()) throw DomainError("simplex QP coefficients must be finite");
    if ((qp.a.array() < 0.0).any()) throw DomainError("simplex QP quadratic coefficients must be >= 0");
}

Eigen::ArrayXd water_level(const Eigen::ArrayXd& b, const Eigen::ArrayXd& a2, double eta) {
    return ((eta - b) / a2).max(0.0);
}

// eta solving sum_{k in support} (eta - b_k) / a2_k = 1 exactly, measured
// from the smallest b on the support.
double support_level(const Eigen::ArrayXd& b, const Eigen::ArrayXd& a2, double probe) {
    double base = INFINITY;
    for (Eigen::Index k = 0; k < b.size(); ++k)
        if (b(k) < probe) base = std::min(base, b(k));
    double inv = 0.0;
    double weighted = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        if (b(k) < probe) {
            inv += 1.0 / a2(k);
            weighted += (b(k) - base) / a2(k);
        }
    }
    return base + (1.0 + weighted) / inv;
}

} // namespace

Eigen::VectorXd solve(const SeparableSimplexQP& qp) {
    validate(qp);
    const Eigen::Index d = qp.a.size();
    const Eigen::ArrayXd b = qp.b.array();
    const Eigen::ArrayXd a2 = 2.0 * qp.a.array().max(kCurvatureFloor);

    const auto excess = [&](double eta) { return water_level(b, a2, eta).sum() - 1.0; };

    // excess(lo) = -1, excess(hi) >= d - 1 >= 0
    double lo = b.minCoeff();
    double hi = b.maxCoeff() + a2.maxCoeff() * static_cast<double>(d);
    for (int it = 0; it < 400 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }

    // Polish on the support found at the upper bracket; fall back to the
    // bracket midpoint if the closed form disagrees with that support.
    double eta = support_level(b, a2, hi);
    const bool consistent = ((b < eta) == (b < hi)).all();
    if (!consistent || !std::isfinite(eta)) eta = 0.5 * (lo + hi);

    Eigen::VectorXd theta = water_level(b, a2, eta).matrix();
    const double total = theta.sum();
    if (!(total > 0.0)) {
        // eta landed on min b exactly; put all mass on the smallest linear term.
        theta.setZero();
        Eigen::Index arg = 0;
        b.minCoeff(&arg);
        theta(arg) = 1.0;
        return theta;
    }

    // The sum defect goes to the flattest support coordinate, whose gradient
    // barely moves; rescaling everything would shift the stiff ones.
    Eigen::Index flattest = -1;
    for (Eigen::Index k = 0; k < d; ++k)
        if (theta(k) > 0.0 && (flattest < 0 || a2(k) < a2(flattest))) flattest = k;
    const double defect = 1.0 - total;
    if (theta(flattest) + defect >= 0.0) {
        theta(flattest) += defect;
        return theta;
    }
    return theta / total;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index d = v.size();
    if (d == 0) return v;
    std::vector<double> sorted(v.data(), v.data() + d);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        cumulative += sorted[static_cast<std::size_t>(k)];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] - t > 0.0) tau = t;
    }
    Eigen::VectorXd out = (v.array() - tau).max(0.0).matrix();
    return out / out.sum();
}

double kkt_residual(const SeparableSimplexQP& qp, const Eigen::VectorXd& theta) {
    const Eigen::ArrayXd g = 2.0 * qp.a.array().max(kCurvatureFloor) * theta.array() + qp.b.array();
    double lo = INFINITY;
    double hi = -INFINITY;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        if (theta(k) > 0.0) {
            lo = std::min(lo, g(k));
            hi = std::max(hi, g(k));
        }
    }
    if (lo > hi) return INFINITY; // empty support: not a simplex point
    double residual = hi - lo;
    for (Eigen::Index k = 0; k < theta.size(); ++k)
        if (theta(k) <= 0.0) residual = std::max(residual, lo - g(k));
    return residual;
}

} // namespace fnmf::simplex
