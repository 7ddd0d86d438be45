#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fnmf/graph.hpp"

namespace fnmf {

// How the P block is refreshed.
//   per_sample    : each row minimizes sum_j p_ij^2 e_ij independently (p_ij ∝ 1/e_ij).
//   paper_literal : errors are pooled over samples first, so every row is identical.
enum class PMode { per_sample, paper_literal };

// Shape of the multiplicative U/V updates.
//   sqrt_ratio : x <- x * sqrt(N / (D + eps)), the form derived for FNMF.
//   ratio      : x <- x * N / (D + eps), the classic Lee-Seung step.
enum class MultiplicativeRule { sqrt_ratio, ratio };

struct SolverConfig {
    int c = 3;
    int m = 3;
    double lambda = 1.0;
    double beta = 1.0;
    int k_neighbors = 5;
    int max_iters = 200;
    double rel_tol = 1e-6;
    double epsilon = 1e-12;
    PMode p_mode = PMode::per_sample;
    MultiplicativeRule rule = MultiplicativeRule::sqrt_ratio;
    bool freeze_theta = false;     // skip the Theta block (theta stays at its initial value)
    bool check_invariants = false; // verify FnmfState invariants after every block update
    std::uint64_t seed = 0;

    /// Throws DomainError unless c >= 1, m >= 1, lambda >= 0, beta >= 0,
    /// max_iters >= 0, rel_tol >= 0 and epsilon > 0.
    void validate() const;
};

/// The four coupled blocks of the model.
struct FnmfState {
    Eigen::MatrixXd U;     // d x c, basis vectors
    Eigen::MatrixXd V;     // n x c, representations (row i <-> sample i)
    Eigen::MatrixXd Theta; // d x m, column j is the weight vector theta^(j)
    Eigen::MatrixXd P;     // n x m, row-stochastic component probabilities

    Eigen::Index features() const { return U.rows(); }
    Eigen::Index samples() const { return V.rows(); }
    Eigen::Index rank() const { return U.cols(); }
    Eigen::Index components() const { return Theta.cols(); }
};

enum class Block { theta, p, u, v };
std::string_view to_string(Block block);

struct SolveTrace {
    double initial_objective = 0.0;
    std::vector<double> objective_per_iter; // after every full sweep
    std::vector<double> block_seconds;      // wall time per sweep, summed over blocks
    int iters_run = 0;
    bool converged = false;
};

/// Reconstruction error of sample i under component j: ||Theta^(j) x_i - U v_i||^2.
/// Returned as an n x m matrix.
Eigen::MatrixXd component_errors(const Eigen::MatrixXd& X, const FnmfState& state);

/// lambda * sum_{j<l} <theta^(j), theta^(l)>. Each unordered pair counts once,
/// which is the weighting under which the per-component Theta step is exact.
double diversity_term(const Eigen::MatrixXd& Theta, double lambda);

/// sum_i sum_j p_ij^2 e_ij + diversity + beta * Tr(V^T L V).
double objective(const Eigen::MatrixXd& X, const Laplacian& L, const FnmfState& state,
                 const SolverConfig& cfg);

/// Throws InvariantViolation describing the first broken FnmfState invariant.
void check_state(const FnmfState& state, double simplex_tol = 1e-12);

/// Blockwise updates. Each returns the new block and leaves `state` untouched.
Eigen::MatrixXd update_theta(const Eigen::MatrixXd& X, const FnmfState& state,
                             const SolverConfig& cfg);
Eigen::MatrixXd update_p(const Eigen::MatrixXd& X, const FnmfState& state,
                         const SolverConfig& cfg);
Eigen::MatrixXd update_u(const Eigen::MatrixXd& X, const FnmfState& state,
                         const SolverConfig& cfg);
Eigen::MatrixXd update_v(const Eigen::MatrixXd& X, const Laplacian& L, const FnmfState& state,
                         const SolverConfig& cfg);

/// Row-wise minimizer of sum_j p_j^2 e_j over the simplex. Rows with zero
/// errors spread their mass uniformly over the zero entries.
Eigen::VectorXd inverse_error_weights(const Eigen::VectorXd& errors);

/// U, V uniform on (0, 1] times mean(X); theta^(j) = 1/d plus U(0, 0.01/d)
/// jitter, renormalized; P = 1/m. Deterministic in cfg.seed.
FnmfState initialize(const Eigen::MatrixXd& X, const SolverConfig& cfg);

struct SolveResult {
    FnmfState state;
    SolveTrace trace;
};

/// Called after every block update with the 0-based iteration index.
using BlockObserver = std::function<void(int iteration, Block block, const FnmfState& state)>;

/// Runs Theta -> P -> U -> V sweeps until the relative objective change falls
/// below cfg.rel_tol or cfg.max_iters sweeps have run. Throws NumericalError if
/// a block produces non-finite values.
SolveResult solve(const Eigen::MatrixXd& X, const SimilarityGraph& S, const SolverConfig& cfg,
                  const BlockObserver& observer = {});

/// Same loop from a caller-provided starting state.
SolveResult solve_from(const Eigen::MatrixXd& X, const Laplacian& L, const SolverConfig& cfg,
                       FnmfState state, const BlockObserver& observer = {});

/// Runs a single-component solve (the plain feature-weighted model) and reports
/// whether the diversity term stayed exactly zero after every block update.
/// Throws DomainError if cfg.m != 1.
bool nmf_special_case_check(const Eigen::MatrixXd& X, const SolverConfig& cfg);

/// CSV with header "iteration,objective,seconds"; iteration 0 is the initial state.
void write_trace_csv(const SolveTrace& trace, const std::filesystem::path& path);

/// Writes U.csv, V.csv, Theta.csv and P.csv into `directory`.
void write_state(const FnmfState& state, const std::filesystem::path& directory);

} // namespace fnmf
