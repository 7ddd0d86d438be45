#pragma once

#include <Eigen/Dense>

namespace fnmf::simplex {

/// min_theta  sum_k a_k theta_k^2 + b_k theta_k   s.t. theta >= 0, sum theta = 1.
struct SeparableSimplexQP {
    Eigen::VectorXd a; // >= 0
    Eigen::VectorXd b;

    double objective(const Eigen::VectorXd& theta) const;
};

inline constexpr double kCurvatureFloor = 1e-12;

/// Global minimizer by water-filling: theta_k = max(0, (eta - b_k) / (2 a'_k)),
/// a'_k = max(a_k, 1e-12), with eta bracketed by bisection and then solved
/// exactly on the detected support. Throws DomainError on non-finite or
/// mismatched coefficients or a negative a_k.
Eigen::VectorXd solve(const SeparableSimplexQP& qp);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Largest violation of the KKT conditions of `qp` at `theta`: the spread of
/// 2 a'_k theta_k + b_k over the support, plus any shortfall of that quantity
/// below the support value off the support.
double kkt_residual(const SeparableSimplexQP& qp, const Eigen::VectorXd& theta);

} // namespace fnmf::simplex
