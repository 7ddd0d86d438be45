#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fnmf/datasets.hpp"
#include "fnmf/fnmf.hpp"

namespace fnmf::experiment {

enum class Method { fnmf, nmf };

std::string to_string(Method method);
Method parse_method(const std::string& name);
std::string to_string(PMode mode);
PMode parse_p_mode(const std::string& name);

struct DataSource {
    std::optional<std::filesystem::path> path; // synthetic three-Gaussian data when empty
    datasets::CsvOptions csv;
    std::uint64_t synthetic_seed = 0;
};

struct NoiseSpec {
    int extra_dims = 0;   // uniform noise rows appended
    int block = 0;        // occlusion side length, 0 disables
    ImageShape image;     // required when block > 0
    std::uint64_t seed = 0;

    bool active() const { return extra_dims > 0 || block > 0; }
};

struct ExperimentSpec {
    DataSource source;
    NoiseSpec noise;
    Method method = Method::fnmf;
    SolverConfig solver;
    int repeats = 1;
    int kmeans_restarts = 20;
    bool normalize = true;
    std::filesystem::path output_dir; // nothing is written when empty

    /// Throws DomainError on repeats < 1, kmeans_restarts < 1 or an invalid solver config.
    void validate() const;
};

struct RepeatResult {
    std::uint64_t seed = 0;
    std::optional<double> acc;
    std::optional<double> nmi;
    int iterations = 0;
    bool converged = false;
    double final_objective = 0.0;
    std::optional<std::string> error;
    double wall_seconds = 0.0; // excluded from result.json
    SolveTrace trace;          // written as a curve file, not embedded in JSON
};

struct Summary {
    double mean = 0.0;
    double std = 0.0; // population standard deviation
};

struct ResultRecord {
    Method method = Method::fnmf;
    SolverConfig config;
    int repeats = 0;
    int kmeans_restarts = 0;
    bool normalized = true;
    int samples = 0;
    int features = 0;
    std::vector<RepeatResult> per_repeat;
    std::optional<Summary> acc;
    std::optional<Summary> nmi;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;
};

struct GridCell {
    double lambda = 0.0;
    double beta = 0.0;
    ResultRecord record;
};

struct GridResult {
    std::vector<GridCell> table; // lambda-major order
    std::size_t best = 0;
};

struct SweepEntry {
    int m = 0;
    ResultRecord record;
};

/// {1e-3, 1e-2, ..., 1e3}
std::vector<double> default_grid();

/// Loads (or synthesizes) the data and applies any configured noise.
DataMatrix load_dataset(const ExperimentSpec& spec);

/// Normalizes, builds the K-neighbour graph, then solves `repeats` times with
/// seeds seed+0 .. seed+repeats-1, clustering each V with k-means. A repeat
/// whose solver throws is recorded with its error and excluded from the summary.
ResultRecord run(const ExperimentSpec& spec);
ResultRecord run(const ExperimentSpec& spec, const DataMatrix& data);

/// One run per (lambda, beta) cell; best cell by mean ACC, first wins ties.
/// Requires labelled data.
GridResult grid_search(const ExperimentSpec& spec, const std::vector<double>& lambda_grid,
                       const std::vector<double>& beta_grid);

std::vector<SweepEntry> sweep_m(const ExperimentSpec& spec, const std::vector<int>& m_values);

/// CSV "iteration,objective", one row per recorded sweep, round-trip precision.
void emit_curves(const SolveTrace& trace, const std::filesystem::path& path);

/// Deterministic JSON for a record (no wall-clock data), pretty-printed.
std::string record_json(const ResultRecord& record);
/// Per-repeat wall times and iteration counts.
std::string timing_json(const ResultRecord& record);

/// Writes result.json, timing.json and curves/repeat_NNN.csv under `dir`.
void write_record(const ResultRecord& record, const std::filesystem::path& dir);
void write_grid(const GridResult& grid, const std::filesystem::path& dir);
void write_sweep(const std::vector<SweepEntry>& sweep, const std::filesystem::path& dir);

/// Worker cap from FNMF_THREADS, else hardware concurrency (at least 1).
int worker_count();

} // namespace fnmf::experiment
