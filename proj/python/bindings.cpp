#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fnmf/datasets.hpp"
#include "fnmf/errors.hpp"
#include "fnmf/experiment.hpp"
#include "fnmf/fnmf.hpp"
#include "fnmf/graph.hpp"
#include "fnmf/metrics.hpp"
#include "fnmf/nmf.hpp"
#include "fnmf/simplex.hpp"

namespace py = pybind11;
using namespace fnmf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DataMatrix wrap(const MatrixXd& X, std::optional<std::vector<int>> labels) {
    DataMatrix data;
    data.values = X;
    data.labels = std::move(labels);
    data.validate();
    return data;
}

SimilarityGraph graph_for(const MatrixXd& X, const SolverConfig& cfg) {
    return cfg.beta > 0.0 ? graph::build_adaptive_knn_graph(X, cfg.k_neighbors) : graph::empty_graph(X.cols());
}

py::dict trace_dict(const SolveTrace& t) {
    py::dict d;
    d["initial_objective"] = t.initial_objective;
    d["objective"] = t.objective_per_iter;
    d["iterations"] = t.iters_run;
    d["converged"] = t.converged;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Feature-weighted nonnegative matrix factorization";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);

    py::enum_<PMode>(m, "PMode")
        .value("per_sample", PMode::per_sample)
        .value("paper_literal", PMode::paper_literal);
    py::enum_<MultiplicativeRule>(m, "MultiplicativeRule")
        .value("sqrt_ratio", MultiplicativeRule::sqrt_ratio)
        .value("ratio", MultiplicativeRule::ratio);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("c", &SolverConfig::c)
        .def_readwrite("m", &SolverConfig::m)
        .def_readwrite("lambda_", &SolverConfig::lambda)
        .def_readwrite("beta", &SolverConfig::beta)
        .def_readwrite("k_neighbors", &SolverConfig::k_neighbors)
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("rel_tol", &SolverConfig::rel_tol)
        .def_readwrite("epsilon", &SolverConfig::epsilon)
        .def_readwrite("p_mode", &SolverConfig::p_mode)
        .def_readwrite("rule", &SolverConfig::rule)
        .def_readwrite("freeze_theta", &SolverConfig::freeze_theta)
        .def_readwrite("check_invariants", &SolverConfig::check_invariants)
        .def_readwrite("seed", &SolverConfig::seed)
        .def("validate", &SolverConfig::validate);

    m.def(
        "generate_three_gaussian",
        [](std::uint64_t seed, int per_class) {
            auto X = datasets::generate_three_gaussian(seed, per_class);
            const auto& labels = *X.labels;
            return py::make_tuple(X.values, py::array_t<int>(static_cast<py::ssize_t>(labels.size()), labels.data()));
        },
        py::arg("seed"), py::arg("samples_per_class") = 300,
        "Returns (X, labels) with X of shape (7, 3 * samples_per_class).");

    m.def(
        "normalize_unit_columns",
        [](const MatrixXd& X) { return datasets::normalize_unit_columns(wrap(X, std::nullopt)).values; },
        py::arg("X"));

    m.def(
        "knn_graph",
        [](const MatrixXd& X, int k) {
            const auto S = graph::build_adaptive_knn_graph(X, k);
            std::vector<Eigen::Index> rows, cols;
            std::vector<double> weights;
            for (Eigen::Index i = 0; i < S.size(); ++i)
                for (const auto& nb : S.row(i)) {
                    rows.push_back(i);
                    cols.push_back(nb.index);
                    weights.push_back(nb.weight);
                }
            return py::make_tuple(rows, cols, weights);
        },
        py::arg("X"), py::arg("k") = 5, "Edge list (rows, cols, weights) of the adaptive K-neighbour graph.");

    m.def(
        "simplex_solve", [](const VectorXd& a, const VectorXd& b) { return simplex::solve({a, b}); },
        py::arg("a"), py::arg("b"), "argmin sum a*t^2 + b*t over the probability simplex");
    m.def("project_to_simplex", &simplex::project_to_simplex, py::arg("v"));

    m.def(
        "solve",
        [](const MatrixXd& X, const SolverConfig& cfg) {
            SolveResult r;
            {
                py::gil_scoped_release release;
                r = solve(X, graph_for(X, cfg), cfg);
            }
            py::dict d = trace_dict(r.trace);
            d["U"] = r.state.U;
            d["V"] = r.state.V;
            d["Theta"] = r.state.Theta;
            d["P"] = r.state.P;
            return d;
        },
        py::arg("X"), py::arg("config") = SolverConfig{});

    m.def(
        "nmf_solve",
        [](const MatrixXd& X, int c, int max_iters, double rel_tol, std::uint64_t seed) {
            nmf::NmfConfig cfg{c, max_iters, rel_tol, 1e-12, seed};
            nmf::NmfResult r;
            {
                py::gil_scoped_release release;
                r = nmf::nmf_solve(X, cfg);
            }
            py::dict d = trace_dict(r.trace);
            d["U"] = r.factors.U;
            d["V"] = r.factors.V;
            return d;
        },
        py::arg("X"), py::arg("c") = 3, py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-6,
        py::arg("seed") = 0);

    m.def(
        "kmeans",
        [](const MatrixXd& points, int c, int restarts, std::uint64_t seed) {
            const auto r = metrics::kmeans(points, c, restarts, seed);
            return py::make_tuple(r.assignments, r.centroids, r.wcss);
        },
        py::arg("points"), py::arg("c"), py::arg("restarts") = 20, py::arg("seed") = 0);
    m.def(
        "accuracy", [](const std::vector<int>& p, const std::vector<int>& t) { return metrics::accuracy(p, t); },
        py::arg("pred"), py::arg("truth"));
    m.def(
        "nmi", [](const std::vector<int>& p, const std::vector<int>& t) { return metrics::nmi(p, t); },
        py::arg("pred"), py::arg("truth"));

    m.def(
        "run_json",
        [](const MatrixXd& X, std::optional<std::vector<int>> labels, const std::string& method,
           const SolverConfig& cfg, int repeats, int kmeans_restarts, bool normalize) {
            experiment::ExperimentSpec spec;
            spec.method = experiment::parse_method(method);
            spec.solver = cfg;
            spec.repeats = repeats;
            spec.kmeans_restarts = kmeans_restarts;
            spec.normalize = normalize;
            const DataMatrix data = wrap(X, std::move(labels));
            py::gil_scoped_release release;
            return experiment::record_json(experiment::run(spec, data));
        },
        py::arg("X"), py::arg("labels") = py::none(), py::arg("method") = "fnmf",
        py::arg("config") = SolverConfig{}, py::arg("repeats") = 1, py::arg("kmeans_restarts") = 20,
        py::arg("normalize") = true);
}
