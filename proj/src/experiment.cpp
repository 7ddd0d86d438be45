#include "fnmf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "fnmf/errors.hpp"
#include "fnmf/graph.hpp"
#include "fnmf/metrics.hpp"
#include "fnmf/nmf.hpp"
#include "text.hpp"

namespace fnmf::experiment {

using nlohmann::ordered_json;

std::string to_string(Method method) { return method == Method::fnmf ? "fnmf" : "nmf"; }

Method parse_method(const std::string& name) {
    if (name == "fnmf") return Method::fnmf;
    if (name == "nmf") return Method::nmf;
    throw DomainError("unknown method '" + name + "' (expected fnmf or nmf)");
}

std::string to_string(PMode mode) { return mode == PMode::per_sample ? "per_sample" : "paper_literal"; }

PMode parse_p_mode(const std::string& name) {
    if (name == "per_sample" || name == "per-sample") return PMode::per_sample;
    if (name == "paper_literal" || name == "paper-literal") return PMode::paper_literal;
    throw DomainError("unknown p-mode '" + name + "' (expected per_sample or paper_literal)");
}

void ExperimentSpec::validate() const {
    if (repeats < 1) throw DomainError("repeat count must be at least 1");
    if (kmeans_restarts < 1) throw DomainError("k-means restarts must be at least 1");
    solver.validate();
}

std::vector<double> default_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("FNMF_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return std::min(hw, cap);
    }
    return hw;
}

DataMatrix load_dataset(const ExperimentSpec& spec) {
    DataMatrix X = spec.source.path ? datasets::load_csv(*spec.source.path, spec.source.csv)
                                    : datasets::generate_three_gaussian(spec.source.synthetic_seed);
    if (spec.noise.extra_dims > 0) X = datasets::inject_noise_dims(X, spec.noise.extra_dims, spec.noise.seed);
    if (spec.noise.block > 0)
        X = datasets::inject_block_occlusion(X, spec.noise.image, spec.noise.block, spec.noise.seed + 1);
    X.validate();
    return X;
}

namespace {

struct Prepared {
    Eigen::MatrixXd X;
    std::optional<std::vector<int>> labels;
    Laplacian L;
};

Prepared prepare(const ExperimentSpec& spec, const DataMatrix& data) {
    data.validate();
    Prepared p;
    p.X = spec.normalize ? datasets::normalize_unit_columns(data).values : data.values;
    p.labels = data.labels;
    if (spec.method == Method::fnmf) {
        const SimilarityGraph S = spec.solver.beta > 0.0
                                      ? graph::build_adaptive_knn_graph(p.X, spec.solver.k_neighbors)
                                      : graph::empty_graph(p.X.cols());
        p.L = graph::laplacian(S);
    }
    return p;
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
}

RepeatResult run_repeat(const ExperimentSpec& spec, const Prepared& p, std::uint64_t seed) {
    RepeatResult r;
    r.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Eigen::MatrixXd V;
        if (spec.method == Method::fnmf) {
            SolverConfig cfg = spec.solver;
            cfg.seed = seed;
            auto result = solve_from(p.X, p.L, cfg, initialize(p.X, cfg));
            V = std::move(result.state.V);
            r.trace = std::move(result.trace);
        } else {
            nmf::NmfConfig cfg{spec.solver.c, spec.solver.max_iters, spec.solver.rel_tol, spec.solver.epsilon, seed};
            auto result = nmf::nmf_solve(p.X, cfg);
            V = std::move(result.factors.V);
            r.trace = std::move(result.trace);
        }
        r.iterations = r.trace.iters_run;
        r.converged = r.trace.converged;
        r.final_objective =
            r.trace.objective_per_iter.empty() ? r.trace.initial_objective : r.trace.objective_per_iter.back();
        const auto km = metrics::kmeans(V, spec.solver.c, spec.kmeans_restarts, seed);
        if (p.labels) {
            r.acc = metrics::accuracy(km.assignments, *p.labels);
            r.nmi = metrics::nmi(km.assignments, *p.labels);
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::optional<Summary> summarize(const std::vector<RepeatResult>& runs, std::optional<double> RepeatResult::*field) {
    std::vector<double> xs;
    for (const auto& r : runs)
        if (!r.error && (r.*field)) xs.push_back(*(r.*field));
    if (xs.empty()) return std::nullopt;
    Summary s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

ResultRecord run_prepared(const ExperimentSpec& spec, const Prepared& p) {
    ResultRecord rec;
    rec.method = spec.method;
    rec.config = spec.solver;
    rec.repeats = spec.repeats;
    rec.kmeans_restarts = spec.kmeans_restarts;
    rec.normalized = spec.normalize;
    rec.samples = static_cast<int>(p.X.cols());
    rec.features = static_cast<int>(p.X.rows());
    rec.per_repeat.resize(static_cast<std::size_t>(spec.repeats));

    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(spec.repeats, [&](int r) {
        rec.per_repeat[static_cast<std::size_t>(r)] =
            run_repeat(spec, p, spec.solver.seed + static_cast<std::uint64_t>(r));
    });
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    rec.acc = summarize(rec.per_repeat, &RepeatResult::acc);
    rec.nmi = summarize(rec.per_repeat, &RepeatResult::nmi);
    int ok = 0;
    for (const auto& r : rec.per_repeat)
        if (!r.error) {
            rec.mean_iterations += r.iterations;
            ++ok;
        }
    if (ok > 0) rec.mean_iterations /= ok;
    return rec;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json summary_json(const std::optional<Summary>& s) {
    if (!s) return nullptr;
    return ordered_json{{"mean", s->mean}, {"std", s->std}};
}

ordered_json config_json(const SolverConfig& cfg) {
    return ordered_json{
        {"c", cfg.c},
        {"m", cfg.m},
        {"lambda", cfg.lambda},
        {"beta", cfg.beta},
        {"k_neighbors", cfg.k_neighbors},
        {"max_iters", cfg.max_iters},
        {"rel_tol", cfg.rel_tol},
        {"epsilon", cfg.epsilon},
        {"p_mode", to_string(cfg.p_mode)},
        {"rule", cfg.rule == MultiplicativeRule::sqrt_ratio ? "sqrt_ratio" : "ratio"},
        {"seed", cfg.seed},
    };
}

ordered_json record_object(const ResultRecord& rec) {
    ordered_json repeats = ordered_json::array();
    for (const auto& r : rec.per_repeat) {
        repeats.push_back(ordered_json{
            {"seed", r.seed},
            {"acc", optional_number(r.acc)},
            {"nmi", optional_number(r.nmi)},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"final_objective", r.final_objective},
            {"error", r.error ? ordered_json(*r.error) : ordered_json(nullptr)},
        });
    }
    return ordered_json{
        {"schema", "fnmf.result/1"},
        {"method", to_string(rec.method)},
        {"config", config_json(rec.config)},
        {"kmeans_restarts", rec.kmeans_restarts},
        {"normalized", rec.normalized},
        {"data", {{"samples", rec.samples}, {"features", rec.features}}},
        {"repeats", rec.repeats},
        {"per_repeat", std::move(repeats)},
        {"acc", summary_json(rec.acc)},
        {"nmi", summary_json(rec.nmi)},
        {"mean_iterations", rec.mean_iterations},
    };
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string summary_cells(const ResultRecord& rec) {
    const auto cell = [](const std::optional<Summary>& s, bool mean) {
        return s ? detail::format_double(mean ? s->mean : s->std) : std::string();
    };
    return cell(rec.acc, true) + ',' + cell(rec.acc, false) + ',' + cell(rec.nmi, true) + ',' +
           cell(rec.nmi, false) + ',' + detail::format_double(rec.mean_iterations);
}

} // namespace

ResultRecord run(const ExperimentSpec& spec) {
    spec.validate();
    return run(spec, load_dataset(spec));
}

ResultRecord run(const ExperimentSpec& spec, const DataMatrix& data) {
    spec.validate();
    auto record = run_prepared(spec, prepare(spec, data));
    if (!spec.output_dir.empty()) write_record(record, spec.output_dir);
    return record;
}

GridResult grid_search(const ExperimentSpec& spec, const std::vector<double>& lambda_grid,
                       const std::vector<double>& beta_grid) {
    spec.validate();
    if (lambda_grid.empty() || beta_grid.empty()) throw DomainError("parameter grids must be non-empty");
    const DataMatrix data = load_dataset(spec);
    if (!data.labels) throw DomainError("grid search needs labelled data to rank cells");

    GridResult grid;
    std::optional<Prepared> cached;
    double cached_beta = -1.0;
    for (double lambda : lambda_grid) {
        for (double beta : beta_grid) {
            ExperimentSpec cell = spec;
            cell.solver.lambda = lambda;
            cell.solver.beta = beta;
            cell.validate();
            // the graph only depends on whether beta is zero
            const double key = beta > 0.0 ? 1.0 : 0.0;
            if (!cached || cached_beta != key) {
                cached = prepare(cell, data);
                cached_beta = key;
            }
            grid.table.push_back({lambda, beta, run_prepared(cell, *cached)});
        }
    }
    double best = -1.0;
    for (std::size_t i = 0; i < grid.table.size(); ++i) {
        const auto& acc = grid.table[i].record.acc;
        const double score = acc ? acc->mean : -1.0;
        if (score > best) {
            best = score;
            grid.best = i;
        }
    }
    if (!spec.output_dir.empty()) write_grid(grid, spec.output_dir);
    return grid;
}

std::vector<SweepEntry> sweep_m(const ExperimentSpec& spec, const std::vector<int>& m_values) {
    spec.validate();
    if (m_values.empty()) throw DomainError("m sweep needs at least one value");
    for (int m : m_values)
        if (m < 1) throw DomainError("every m in the sweep must be >= 1");
    const DataMatrix data = load_dataset(spec);
    const Prepared p = prepare(spec, data);
    std::vector<SweepEntry> out;
    for (int m : m_values) {
        ExperimentSpec cell = spec;
        cell.solver.m = m;
        out.push_back({m, run_prepared(cell, p)});
    }
    if (!spec.output_dir.empty()) write_sweep(out, spec.output_dir);
    return out;
}

void emit_curves(const SolveTrace& trace, const std::filesystem::path& path) {
    std::string text = "iteration,objective\n";
    for (std::size_t t = 0; t < trace.objective_per_iter.size(); ++t)
        text += std::to_string(t + 1) + ',' + detail::format_double(trace.objective_per_iter[t]) + '\n';
    write_text(path, text);
}

std::string record_json(const ResultRecord& record) { return record_object(record).dump(2) + '\n'; }

std::string timing_json(const ResultRecord& record) {
    ordered_json per = ordered_json::array();
    for (const auto& r : record.per_repeat)
        per.push_back({{"seed", r.seed}, {"iterations", r.iterations}, {"wall_seconds", r.wall_seconds}});
    return ordered_json{{"schema", "fnmf.timing/1"}, {"wall_seconds", record.wall_seconds}, {"per_repeat", per}}
               .dump(2) +
           '\n';
}

void write_record(const ResultRecord& record, const std::filesystem::path& dir) {
    write_text(dir / "result.json", record_json(record));
    write_text(dir / "timing.json", timing_json(record));
    for (std::size_t r = 0; r < record.per_repeat.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof name, "repeat_%03zu.csv", r);
        emit_curves(record.per_repeat[r].trace, dir / "curves" / name);
    }
}

void write_grid(const GridResult& grid, const std::filesystem::path& dir) {
    std::string csv = "lambda,beta,acc_mean,acc_std,nmi_mean,nmi_std,mean_iterations\n";
    ordered_json cells = ordered_json::array();
    for (const auto& cell : grid.table) {
        csv += detail::format_double(cell.lambda) + ',' + detail::format_double(cell.beta) + ',' +
               summary_cells(cell.record) + '\n';
        cells.push_back({{"lambda", cell.lambda},
                         {"beta", cell.beta},
                         {"acc", summary_json(cell.record.acc)},
                         {"nmi", summary_json(cell.record.nmi)},
                         {"mean_iterations", cell.record.mean_iterations}});
    }
    write_text(dir / "grid.csv", csv);
    if (grid.table.empty()) return;
    const auto& best = grid.table[grid.best];
    const ordered_json doc{{"schema", "fnmf.grid/1"},
                           {"best", {{"lambda", best.lambda}, {"beta", best.beta}, {"record", record_object(best.record)}}},
                           {"cells", cells}};
    write_text(dir / "grid.json", doc.dump(2) + '\n');
    write_record(best.record, dir / "best");
}

void write_sweep(const std::vector<SweepEntry>& sweep, const std::filesystem::path& dir) {
    std::string csv = "m,acc_mean,acc_std,nmi_mean,nmi_std,mean_iterations\n";
    ordered_json records = ordered_json::array();
    for (const auto& e : sweep) {
        csv += std::to_string(e.m) + ',' + summary_cells(e.record) + '\n';
        records.push_back({{"m", e.m}, {"record", record_object(e.record)}});
    }
    write_text(dir / "sweep_m.csv", csv);
    write_text(dir / "sweep_m.json", ordered_json{{"schema", "fnmf.sweep_m/1"}, {"records", records}}.dump(2) + '\n');
}

} // namespace fnmf::experiment
