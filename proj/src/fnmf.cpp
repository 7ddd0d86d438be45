#include "fnmf/fnmf.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "fnmf/errors.hpp"
#include "fnmf/simplex.hpp"
#include "text.hpp"

namespace fnmf {

void SolverConfig::validate() const {
    if (c < 1) throw DomainError("c must be at least 1");
    if (m < 1) throw DomainError("m must be at least 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 0");
    if (max_iters < 0) throw DomainError("max_iters must be >= 0");
    if (!(rel_tol >= 0.0)) throw DomainError("rel_tol must be >= 0");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

std::string_view to_string(Block block) {
    switch (block) {
    case Block::theta: return "theta";
    case Block::p: return "P";
    case Block::u: return "U";
    case Block::v: return "V";
    }
    return "?";
}

namespace {

void check_shapes(const Eigen::MatrixXd& X, const FnmfState& s) {
    const auto d = X.rows();
    const auto n = X.cols();
    if (s.U.rows() != d || s.Theta.rows() != d) throw DomainError("state feature dimension does not match X");
    if (s.V.rows() != n || s.P.rows() != n) throw DomainError("state sample count does not match X");
    if (s.V.cols() != s.U.cols()) throw DomainError("U and V ranks differ");
    if (s.P.cols() != s.Theta.cols()) throw DomainError("P and Theta component counts differ");
}

// Column i: sum_j p_ij^2 theta^(j) .* x_i
Eigen::MatrixXd weighted_samples(const Eigen::MatrixXd& X, const FnmfState& s) {
    const Eigen::MatrixXd P2 = s.P.array().square().matrix();
    return ((s.Theta * P2.transpose()).array() * X.array()).matrix();
}

Eigen::ArrayXXd multiplicative_factor(const Eigen::ArrayXXd& num, const Eigen::ArrayXXd& den,
                                      const SolverConfig& cfg) {
    const Eigen::ArrayXXd ratio = num / (den + cfg.epsilon);
    return cfg.rule == MultiplicativeRule::sqrt_ratio ? ratio.sqrt() : ratio;
}

bool all_finite(const FnmfState& s, Block b) {
    switch (b) {
    case Block::theta: return s.Theta.allFinite();
    case Block::p: return s.P.allFinite();
    case Block::u: return s.U.allFinite();
    case Block::v: return s.V.allFinite();
    }
    return false;
}

} // namespace

Eigen::MatrixXd component_errors(const Eigen::MatrixXd& X, const FnmfState& state) {
    check_shapes(X, state);
    const Eigen::MatrixXd R = state.U * state.V.transpose();
    Eigen::MatrixXd E(X.cols(), state.components());
    for (Eigen::Index j = 0; j < state.components(); ++j)
        E.col(j) = (state.Theta.col(j).asDiagonal() * X - R).colwise().squaredNorm().transpose();
    return E;
}

double diversity_term(const Eigen::MatrixXd& Theta, double lambda) {
    double overlap = 0.0;
    for (Eigen::Index j = 0; j < Theta.cols(); ++j)
        for (Eigen::Index l = j + 1; l < Theta.cols(); ++l) overlap += Theta.col(j).dot(Theta.col(l));
    return lambda * overlap;
}

double objective(const Eigen::MatrixXd& X, const Laplacian& L, const FnmfState& state,
                 const SolverConfig& cfg) {
    check_shapes(X, state);
    if (L.size() != X.cols()) throw DomainError("graph size does not match sample count");
    const Eigen::MatrixXd E = component_errors(X, state);
    const double reconstruction = (state.P.array().square() * E.array()).sum();
    const double graph = cfg.beta == 0.0 ? 0.0 : cfg.beta * L.quadratic_form(state.V);
    return reconstruction + diversity_term(state.Theta, cfg.lambda) + graph;
}

void check_state(const FnmfState& s, double tol) {
    if (!(s.U.array() >= 0.0).all()) throw InvariantViolation("U has a negative or NaN entry");
    if (!(s.V.array() >= 0.0).all()) throw InvariantViolation("V has a negative or NaN entry");
    if (!(s.Theta.array() >= 0.0).all()) throw InvariantViolation("Theta has a negative or NaN entry");
    if (!(s.P.array() >= 0.0).all()) throw InvariantViolation("P has a negative or NaN entry");
    for (Eigen::Index j = 0; j < s.Theta.cols(); ++j)
        if (std::abs(s.Theta.col(j).sum() - 1.0) > tol)
            throw InvariantViolation("theta^(" + std::to_string(j) + ") does not sum to 1");
    for (Eigen::Index i = 0; i < s.P.rows(); ++i)
        if (std::abs(s.P.row(i).sum() - 1.0) > tol)
            throw InvariantViolation("row " + std::to_string(i) + " of P does not sum to 1");
}

Eigen::MatrixXd update_theta(const Eigen::MatrixXd& X, const FnmfState& state, const SolverConfig& cfg) {
    check_shapes(X, state);
    const Eigen::MatrixXd R = state.U * state.V.transpose();
    const Eigen::MatrixXd X2 = X.array().square().matrix();
    const Eigen::MatrixXd XR = (X.array() * R.array()).matrix();

    Eigen::MatrixXd Theta = state.Theta;
    for (Eigen::Index j = 0; j < Theta.cols(); ++j) {
        const Eigen::VectorXd w = state.P.col(j).array().square().matrix();
        const Eigen::VectorXd others = Theta.rowwise().sum() - Theta.col(j);
        simplex::SeparableSimplexQP qp{X2 * w, cfg.lambda * others - 2.0 * (XR * w)};
        Theta.col(j) = simplex::solve(qp);
    }
    return Theta;
}

Eigen::VectorXd inverse_error_weights(const Eigen::VectorXd& errors) {
    const double smallest = errors.minCoeff();
    Eigen::VectorXd p(errors.size());
    if (smallest <= 0.0) {
        p = (errors.array() <= 0.0).cast<double>().matrix();
    } else {
        // scale by the smallest error so nothing overflows
        p = (smallest / errors.array()).matrix();
    }
    return p / p.sum();
}

Eigen::MatrixXd update_p(const Eigen::MatrixXd& X, const FnmfState& state, const SolverConfig& cfg) {
    const Eigen::MatrixXd E = component_errors(X, state);
    Eigen::MatrixXd P(E.rows(), E.cols());
    if (cfg.p_mode == PMode::paper_literal) {
        const Eigen::VectorXd pooled = E.colwise().sum().transpose();
        P.rowwise() = inverse_error_weights(pooled).transpose();
    } else {
        for (Eigen::Index i = 0; i < E.rows(); ++i)
            P.row(i) = inverse_error_weights(E.row(i).transpose()).transpose();
    }
    return P;
}

Eigen::MatrixXd update_u(const Eigen::MatrixXd& X, const FnmfState& state, const SolverConfig& cfg) {
    check_shapes(X, state);
    const Eigen::MatrixXd Y = weighted_samples(X, state);
    const Eigen::VectorXd s = state.P.array().square().rowwise().sum().matrix();
    const Eigen::MatrixXd num = Y * state.V;
    const Eigen::MatrixXd gram = state.V.transpose() * s.asDiagonal() * state.V;
    const Eigen::MatrixXd den = state.U * gram;
    return (state.U.array() * multiplicative_factor(num.array(), den.array(), cfg)).matrix();
}

Eigen::MatrixXd update_v(const Eigen::MatrixXd& X, const Laplacian& L, const FnmfState& state,
                         const SolverConfig& cfg) {
    check_shapes(X, state);
    const Eigen::MatrixXd Y = weighted_samples(X, state);
    const Eigen::VectorXd s = state.P.array().square().rowwise().sum().matrix();
    const Eigen::MatrixXd UtU = state.U.transpose() * state.U;

    Eigen::MatrixXd num = Y.transpose() * state.U;
    Eigen::MatrixXd den = s.asDiagonal() * (state.V * UtU);
    if (cfg.beta != 0.0) {
        if (L.size() != X.cols()) throw DomainError("graph size does not match sample count");
        // neighbour sums use the pre-update V for every row
        num += cfg.beta * (L.adjacency * state.V);
        den += cfg.beta * (L.degree.asDiagonal() * state.V);
    }
    return (state.V.array() * multiplicative_factor(num.array(), den.array(), cfg)).matrix();
}

FnmfState initialize(const Eigen::MatrixXd& X, const SolverConfig& cfg) {
    cfg.validate();
    const Eigen::Index d = X.rows();
    const Eigen::Index n = X.cols();
    const double mean = X.size() > 0 ? X.mean() : 0.0;
    const double scale = mean > 0.0 ? mean : 1.0;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw = [&] { return (1.0 - unit(rng)) * scale; }; // (0, scale]

    FnmfState s;
    s.U.resize(d, cfg.c);
    s.V.resize(n, cfg.c);
    for (Eigen::Index k = 0; k < cfg.c; ++k)
        for (Eigen::Index i = 0; i < d; ++i) s.U(i, k) = draw();
    for (Eigen::Index k = 0; k < cfg.c; ++k)
        for (Eigen::Index i = 0; i < n; ++i) s.V(i, k) = draw();

    const double base = 1.0 / static_cast<double>(d);
    std::uniform_real_distribution<double> jitter(0.0, 0.01 * base);
    s.Theta.resize(d, cfg.m);
    for (Eigen::Index j = 0; j < cfg.m; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) s.Theta(k, j) = base + jitter(rng);
        s.Theta.col(j) /= s.Theta.col(j).sum();
    }
    s.P = Eigen::MatrixXd::Constant(n, cfg.m, 1.0 / static_cast<double>(cfg.m));
    return s;
}

SolveResult solve(const Eigen::MatrixXd& X, const SimilarityGraph& S, const SolverConfig& cfg,
                  const BlockObserver& observer) {
    if (S.size() != X.cols()) throw DomainError("graph size does not match sample count");
    return solve_from(X, graph::laplacian(S), cfg, initialize(X, cfg), observer);
}

SolveResult solve_from(const Eigen::MatrixXd& X, const Laplacian& L, const SolverConfig& cfg, FnmfState state,
                       const BlockObserver& observer) {
    cfg.validate();
    check_shapes(X, state);
    if (state.rank() != cfg.c || state.components() != cfg.m)
        throw DomainError("initial state does not match c and m of the config");
    if ((X.array() < 0.0).any()) throw DomainError("X must be nonnegative");

    const auto after = [&](int it, Block b) {
        if (!all_finite(state, b))
            throw NumericalError("non-finite values after update", it, std::string(to_string(b)));
        if (cfg.check_invariants) check_state(state);
        if (observer) observer(it, b, state);
    };

    SolveResult out;
    SolveTrace& trace = out.trace;
    trace.initial_objective = objective(X, L, state, cfg);
    if (!std::isfinite(trace.initial_objective))
        throw NumericalError("non-finite objective at the starting state", 0, "initial");
    double previous = trace.initial_objective;

    using clock = std::chrono::steady_clock;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const auto t0 = clock::now();
        if (!cfg.freeze_theta) {
            state.Theta = update_theta(X, state, cfg);
            after(it, Block::theta);
        }
        state.P = update_p(X, state, cfg);
        after(it, Block::p);
        state.U = update_u(X, state, cfg);
        after(it, Block::u);
        state.V = update_v(X, L, state, cfg);
        after(it, Block::v);
        const auto t1 = clock::now();

        const double current = objective(X, L, state, cfg);
        if (!std::isfinite(current)) throw NumericalError("non-finite objective", it, "objective");
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
    out.state = std::move(state);
    return out;
}

bool nmf_special_case_check(const Eigen::MatrixXd& X, const SolverConfig& cfg) {
    if (cfg.m != 1) throw DomainError("the single-component check requires m == 1");
    const SimilarityGraph S =
        cfg.beta == 0.0 ? graph::empty_graph(X.cols()) : graph::build_adaptive_knn_graph(X, cfg.k_neighbors);
    bool zero = true;
    const auto result = solve(X, S, cfg, [&](int, Block, const FnmfState& s) {
        zero = zero && diversity_term(s.Theta, cfg.lambda) == 0.0;
    });
    return zero && diversity_term(result.state.Theta, cfg.lambda) == 0.0;
}

void write_trace_csv(const SolveTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "iteration,objective,seconds\n";
    out << "0," << detail::format_double(trace.initial_objective) << ",0\n";
    for (std::size_t t = 0; t < trace.objective_per_iter.size(); ++t) {
        const double secs = t < trace.block_seconds.size() ? trace.block_seconds[t] : 0.0;
        out << t + 1 << ',' << detail::format_double(trace.objective_per_iter[t]) << ','
            << detail::format_double(secs) << '\n';
    }
}

void write_state(const FnmfState& state, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    datasets::write_matrix_csv(state.U, directory / "U.csv");
    datasets::write_matrix_csv(state.V, directory / "V.csv");
    datasets::write_matrix_csv(state.Theta, directory / "Theta.csv");
    datasets::write_matrix_csv(state.P, directory / "P.csv");
}

} // namespace fnmf
