// fnmf: command-line harness for feature-weighted NMF experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fnmf/datasets.hpp"
#include "fnmf/errors.hpp"
#include "fnmf/experiment.hpp"

namespace {

using namespace fnmf;
using experiment::ExperimentSpec;

struct CommonFlags {
    std::string data;
    int label_column = -1;
    bool header = false;
    std::uint64_t data_seed = 0;
    std::string method = "fnmf";
    std::string p_mode = "per_sample";
    std::string rule = "sqrt";
    bool no_normalize = false;
    ExperimentSpec spec;
    std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--data", f.data, "CSV file, one sample per row (synthetic three-Gaussian data when omitted)");
    app->add_option("--label-column", f.label_column, "0-based column holding integer labels");
    app->add_flag("--header", f.header, "first CSV line is a header");
    app->add_option("--data-seed", f.data_seed, "seed for the synthetic dataset");
    app->add_option("--method", f.method, "fnmf or nmf")->check(CLI::IsMember({"fnmf", "nmf"}));
    app->add_option("--c", f.spec.solver.c, "number of basis vectors / clusters");
    app->add_option("--m", f.spec.solver.m, "number of feature weighting components");
    app->add_option("--lambda", f.spec.solver.lambda, "diversity weight");
    app->add_option("--beta", f.spec.solver.beta, "graph regularization weight");
    app->add_option("--k-neighbors", f.spec.solver.k_neighbors, "graph neighbourhood size");
    app->add_option("--repeats", f.spec.repeats, "independent solves (seeds seed+0, seed+1, ...)");
    app->add_option("--seed", f.spec.solver.seed, "base seed for solver initialization and k-means");
    app->add_option("--max-iters", f.spec.solver.max_iters, "maximum sweeps per solve");
    app->add_option("--rel-tol", f.spec.solver.rel_tol, "relative objective change that stops a solve");
    app->add_option("--p-mode", f.p_mode, "per_sample or paper_literal")
        ->check(CLI::IsMember({"per_sample", "paper_literal", "per-sample", "paper-literal"}));
    app->add_option("--rule", f.rule, "multiplicative update shape: sqrt or ratio")
        ->check(CLI::IsMember({"sqrt", "ratio"}));
    app->add_option("--kmeans-restarts", f.spec.kmeans_restarts, "k-means restarts per repeat");
    app->add_flag("--no-normalize", f.no_normalize, "skip unit-norm column scaling");
    app->add_option("--out", f.out, "output directory");
}

ExperimentSpec finish(CommonFlags& f) {
    ExperimentSpec spec = f.spec;
    if (!f.data.empty()) spec.source.path = f.data;
    if (f.label_column >= 0) spec.source.csv.label_column = f.label_column;
    spec.source.csv.has_header = f.header;
    spec.source.synthetic_seed = f.data_seed;
    spec.method = experiment::parse_method(f.method);
    spec.solver.p_mode = experiment::parse_p_mode(f.p_mode);
    spec.solver.rule = f.rule == "ratio" ? MultiplicativeRule::ratio : MultiplicativeRule::sqrt_ratio;
    spec.normalize = !f.no_normalize;
    spec.output_dir = f.out;
    spec.validate();
    return spec;
}

std::string summary(const experiment::ResultRecord& rec) {
    char buf[160];
    if (rec.acc && rec.nmi)
        std::snprintf(buf, sizeof buf, "ACC %.4f +- %.4f  NMI %.4f +- %.4f  (%.1f iterations)", rec.acc->mean,
                      rec.acc->std, rec.nmi->mean, rec.nmi->std, rec.mean_iterations);
    else
        std::snprintf(buf, sizeof buf, "no labels; %.1f iterations on average", rec.mean_iterations);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature-weighted NMF: solve, evaluate and sweep"};
    app.require_subcommand(1);

    std::uint64_t synth_seed = 0;
    int per_class = 300;
    std::string synth_out = "synthetic.csv";
    auto* synth = app.add_subcommand("synth", "write the three-Gaussian dataset as CSV (label in the last column)");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--per-class", per_class, "samples per class");
    synth->add_option("--out", synth_out, "output CSV path");

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "repeat solve + k-means + ACC/NMI");
    add_common(run, run_flags);

    CommonFlags grid_flags;
    std::vector<double> lambda_grid = experiment::default_grid();
    std::vector<double> beta_grid = experiment::default_grid();
    auto* grid = app.add_subcommand("grid", "search lambda x beta, report the best cell by mean ACC");
    add_common(grid, grid_flags);
    grid->add_option("--lambda-grid", lambda_grid, "lambda values")->delimiter(',');
    grid->add_option("--beta-grid", beta_grid, "beta values")->delimiter(',');

    CommonFlags sweep_flags;
    std::vector<int> m_values{1, 2, 3, 4, 5};
    auto* sweep = app.add_subcommand("sweep-m", "one run per component count m");
    add_common(sweep, sweep_flags);
    sweep->add_option("--m-values", m_values, "component counts")->delimiter(',');

    CommonFlags noise_flags;
    auto* noise = app.add_subcommand("noise", "inject noise dimensions and/or block occlusions, then run");
    add_common(noise, noise_flags);
    noise->add_option("--noise-dims", noise_flags.spec.noise.extra_dims, "uniform noise rows to append");
    noise->add_option("--block", noise_flags.spec.noise.block, "occlusion block side length");
    noise->add_option("--image-height", noise_flags.spec.noise.image.height, "image height in pixels");
    noise->add_option("--image-width", noise_flags.spec.noise.image.width, "image width in pixels");
    noise->add_option("--noise-seed", noise_flags.spec.noise.seed, "seed for the injected noise");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto X = datasets::generate_three_gaussian(synth_seed, per_class);
            const std::filesystem::path target(synth_out);
            if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
            datasets::write_csv(X, synth_out);
            std::cout << "wrote " << X.samples() << " samples x " << X.features() << " features to " << synth_out
                      << '\n';
        } else if (run->parsed()) {
            const auto rec = experiment::run(finish(run_flags));
            std::cout << experiment::to_string(rec.method) << ": " << summary(rec) << '\n';
        } else if (grid->parsed()) {
            const auto result = experiment::grid_search(finish(grid_flags), lambda_grid, beta_grid);
            const auto& best = result.table[result.best];
            std::cout << "best lambda=" << best.lambda << " beta=" << best.beta << ": " << summary(best.record)
                      << '\n';
        } else if (sweep->parsed()) {
            for (const auto& e : experiment::sweep_m(finish(sweep_flags), m_values))
                std::cout << "m=" << e.m << ": " << summary(e.record) << '\n';
        } else if (noise->parsed()) {
            auto spec = finish(noise_flags);
            if (!spec.noise.active()) throw DomainError("noise needs --noise-dims and/or --block");
            const auto rec = experiment::run(spec);
            std::cout << experiment::to_string(rec.method) << " (noisy): " << summary(rec) << '\n';
        }
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
