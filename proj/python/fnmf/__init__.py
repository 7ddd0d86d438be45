"""Feature-weighted nonnegative matrix factorization.

Matrices follow the library layout: X is features x samples, U is
features x c, V is samples x c, Theta holds one weight vector per column.
"""

import json

from ._core import (
    DomainError,
    FormatError,
    InvariantViolation,
    MultiplicativeRule,
    NumericalError,
    PMode,
    SolverConfig,
    accuracy,
    generate_three_gaussian,
    kmeans,
    knn_graph,
    nmf_solve,
    nmi,
    normalize_unit_columns,
    project_to_simplex,
    simplex_solve,
    solve,
)
from ._core import run_json as _run_json

__all__ = [
    "DomainError",
    "FormatError",
    "InvariantViolation",
    "MultiplicativeRule",
    "NumericalError",
    "PMode",
    "SolverConfig",
    "accuracy",
    "config",
    "generate_three_gaussian",
    "kmeans",
    "knn_graph",
    "nmf_solve",
    "nmi",
    "normalize_unit_columns",
    "project_to_simplex",
    "run",
    "simplex_solve",
    "solve",
]


def config(**fields):
    """SolverConfig from keyword arguments; ``lambda`` may be spelled ``lam``."""
    cfg = SolverConfig()
    for name, value in fields.items():
        if name in ("lam", "lambda"):
            name = "lambda_"
        if not hasattr(cfg, name):
            raise TypeError(f"unknown solver field {name!r}")
        setattr(cfg, name, value)
    return cfg


def run(X, labels=None, method="fnmf", config=None, repeats=1, kmeans_restarts=20, normalize=True):
    """Repeated solve + k-means + scoring; returns the result record as a dict."""
    cfg = config if config is not None else SolverConfig()
    return json.loads(_run_json(X, labels, method, cfg, repeats, kmeans_restarts, normalize))
