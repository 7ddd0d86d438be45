#include "fnmf/nmf.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "fnmf/errors.hpp"

namespace fnmf::nmf {

double reconstruction_error(const Eigen::MatrixXd& X, const NmfFactors& f) {
    return (X - f.U * f.V.transpose()).squaredNorm();
}

NmfFactors initialize(const Eigen::MatrixXd& X, const NmfConfig& cfg) {
    SolverConfig shared;
    shared.c = cfg.c;
    shared.m = 1;
    shared.seed = cfg.seed;
    auto state = fnmf::initialize(X, shared);
    return {std::move(state.U), std::move(state.V)};
}

NmfResult nmf_solve(const Eigen::MatrixXd& X, const NmfConfig& cfg) {
    return nmf_solve_from(X, cfg, initialize(X, cfg));
}

NmfResult nmf_solve_from(const Eigen::MatrixXd& X, const NmfConfig& cfg, NmfFactors f) {
    if (cfg.c < 1) throw DomainError("c must be at least 1");
    if (cfg.max_iters < 0) throw DomainError("max_iters must be >= 0");
    if ((X.array() < 0.0).any()) throw DomainError("X must be nonnegative");
    if (f.U.rows() != X.rows() || f.V.rows() != X.cols() || f.U.cols() != cfg.c || f.V.cols() != cfg.c)
        throw DomainError("initial factors do not match X and c");

    NmfResult out;
    SolveTrace& trace = out.trace;
    trace.initial_objective = reconstruction_error(X, f);
    double previous = trace.initial_objective;

    using clock = std::chrono::steady_clock;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const auto t0 = clock::now();
        const Eigen::MatrixXd XV = X * f.V;
        const Eigen::MatrixXd UVtV = f.U * (f.V.transpose() * f.V);
        f.U = (f.U.array() * XV.array() / (UVtV.array() + cfg.epsilon)).matrix();
        if (!f.U.allFinite()) throw NumericalError("non-finite values after update", it, "U");

        const Eigen::MatrixXd XtU = X.transpose() * f.U;
        const Eigen::MatrixXd VUtU = f.V * (f.U.transpose() * f.U);
        f.V = (f.V.array() * XtU.array() / (VUtU.array() + cfg.epsilon)).matrix();
        if (!f.V.allFinite()) throw NumericalError("non-finite values after update", it, "V");
        const auto t1 = clock::now();

        const double current = reconstruction_error(X, f);
        trace.objective_per_iter.push_back(current);
        trace.block_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        trace.iters_run = it + 1;
        const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
        if (std::abs(previous - current) / scale < cfg.rel_tol) {
            trace.converged = true;
            break;
        }
        previous = current;
    }
    out.factors = std::move(f);
    return out;
}

} // namespace fnmf::nmf
