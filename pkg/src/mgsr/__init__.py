"""Multigene symbolic regression.

Evolves populations of models, each a least-squares weighted sum of
expression-tree genes, and provides Pareto analysis, gene-level bloat
inspection, filtering, REC curves and portable export.
"""

from .analyze import (
    FilterCriteria,
    GeneCatalog,
    apply_filter,
    gene_impact,
    model_from_genes,
    pareto_front_report,
    rec_curve,
    run_summary,
    unique_genes,
)
from .dataset import Dataset, from_arrays, load_csv
from .errors import MgsrError
from .estimator import MultiGeneRegressor
from .evolve import (
    Individual,
    Population,
    RunConfig,
    fast_nondominated_front,
    merge_populations,
    multi_run,
    run,
)
from .export import export_model, model_equation
from .functions import CATALOG, DEFAULT_FUNCTIONS, Palette, make_palette
from .regress import FittedModel, evaluate_model, fit_weights, fitness, gene_response_matrix
from .simplify import simplify, simplify_model
from .tree import (
    Const,
    Func,
    Var,
    canonical_key,
    eval_tree,
    expressional_complexity,
    from_prefix,
    node_count,
    random_tree,
    to_prefix,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "Const",
    "DEFAULT_FUNCTIONS",
    "Dataset",
    "FilterCriteria",
    "FittedModel",
    "Func",
    "GeneCatalog",
    "Individual",
    "MgsrError",
    "MultiGeneRegressor",
    "Palette",
    "Population",
    "RunConfig",
    "Var",
    "apply_filter",
    "canonical_key",
    "eval_tree",
    "evaluate_model",
    "export_model",
    "expressional_complexity",
    "fast_nondominated_front",
    "fit_weights",
    "fitness",
    "from_arrays",
    "from_prefix",
    "gene_impact",
    "gene_response_matrix",
    "load_csv",
    "make_palette",
    "merge_populations",
    "model_equation",
    "model_from_genes",
    "multi_run",
    "node_count",
    "pareto_front_report",
    "random_tree",
    "rec_curve",
    "run",
    "run_summary",
    "simplify",
    "simplify_model",
    "to_prefix",
    "unique_genes",
]
