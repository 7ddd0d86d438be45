#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "fnmf/fnmf.hpp"

namespace fnmf::nmf {

struct NmfFactors {
    Eigen::MatrixXd U; // d x c
    Eigen::MatrixXd V; // n x c
};

struct NmfConfig {
    int c = 3;
    int max_iters = 200;
    double rel_tol = 1e-6;
    double epsilon = 1e-12;
    std::uint64_t seed = 0;
};

struct NmfResult {
    NmfFactors factors;
    SolveTrace trace;
};

/// sum_i ||x_i - U v_i||^2
double reconstruction_error(const Eigen::MatrixXd& X, const NmfFactors& factors);

/// Same draw order and scaling as fnmf::initialize, so a shared seed gives
/// identical U and V for the same X.
NmfFactors initialize(const Eigen::MatrixXd& X, const NmfConfig& cfg);

/// Lee-Seung multiplicative updates: U first, then V, per sweep.
NmfResult nmf_solve(const Eigen::MatrixXd& X, const NmfConfig& cfg);
NmfResult nmf_solve_from(const Eigen::MatrixXd& X, const NmfConfig& cfg, NmfFactors init);

} // namespace fnmf::nmf
