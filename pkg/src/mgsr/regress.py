"""Pseudo-linear interpretation of multigene individuals.

A model with genes t_1..t_G predicts  yhat = b0 + b1*t1(X) + ... + bG*tG(X).
Weights are the minimum-norm least-squares solution over the training rows,
computed via SVD so collinear gene columns (duplicate genes, constants) are
handled without blowing up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InvalidModelError
from .tree import Node, eval_tree, expressional_complexity, node_count

INVALID_FITNESS = float("inf")


@dataclass(frozen=True)
class SplitStats:
    rmse: float
    r2: float
    predictions: np.ndarray = field(compare=False, repr=False)


@dataclass
class FittedModel:
    """A multigene individual with fitted weights and per-split stats."""

    genes: tuple[Node, ...]
    weights: np.ndarray  # length G + 1, bias first
    stats: dict[str, SplitStats]
    complexity: int

    @property
    def rmse_train(self) -> float:
        return self.stats["train"].rmse

    @property
    def r2_train(self) -> float:
        return self.stats["train"].r2

    def predict(self, X: np.ndarray) -> np.ndarray:
        return gene_response_matrix(self.genes, X) @ self.weights


def gene_response_matrix(genes, X: np.ndarray) -> np.ndarray:
    """The N x (G+1) matrix [1 t1 ... tG] over the rows of X.

    Non-finite gene outputs are returned as-is; callers decide whether that
    makes the model invalid.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    cols = [np.ones(n)]
    cols.extend(eval_tree(g, X) for g in genes)
    return np.column_stack(cols)


def svd_cutoff(n_rows: int, n_cols: int) -> float:
    """Relative singular-value cutoff: max(N, G+1) * machine epsilon."""
    return max(n_rows, n_cols) * np.finfo(float).eps


def fit_weights(Gm: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares weights for Gm @ b ~= y (SVD-based).

    Raises InvalidModelError when Gm contains non-finite entries; fitness
    translates that into the +inf sentinel instead of aborting.
    """
    Gm = np.asarray(Gm, dtype=float)
    y = np.asarray(y, dtype=float)
    if Gm.shape[0] != y.shape[0]:
        raise ValueError("row count mismatch between gene responses and y")
    if not np.isfinite(Gm).all():
        raise InvalidModelError("gene response matrix has non-finite entries")
    b, *_ = np.linalg.lstsq(Gm, y, rcond=svd_cutoff(*Gm.shape))
    return b


def rmse(errors: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(errors))))


def fitness(genes, X_train: np.ndarray, y_train: np.ndarray) -> float:
    """Training RMSE of the fitted model; +inf sentinel for invalid models."""
    return fitness_from_matrix(gene_response_matrix(genes, X_train), y_train)


def fitness_from_matrix(Gm: np.ndarray, y_train: np.ndarray) -> float:
    try:
        b = fit_weights(Gm, y_train)
    except InvalidModelError:
        return INVALID_FITNESS
    value = rmse(y_train - Gm @ b)
    return value if np.isfinite(value) else INVALID_FITNESS


def r_squared(y: np.ndarray, yhat: np.ndarray) -> float:
    sse = float(np.sum(np.square(y - yhat)))
    sst = float(np.sum(np.square(y - np.mean(y))))
    if sst == 0.0:
        return 1.0 if sse < 1e-24 else float("-inf")
    return 1.0 - sse / sst


def evaluate_model(
    genes, dataset: Dataset, complexity_measure: str = "expressional"
) -> FittedModel:
    """Fit weights on the train split and report stats for every split present.

    Raises InvalidModelError when the training gene responses are not finite.
    """
    genes = tuple(genes)
    Gm = gene_response_matrix(genes, dataset.X_train)
    b = fit_weights(Gm, dataset.y_train)
    stats: dict[str, SplitStats] = {}
    for split in dataset.splits_present:
        X, y = dataset.rows(split)
        preds = gene_response_matrix(genes, X) @ b
        stats[split] = SplitStats(rmse(y - preds), r_squared(y, preds), preds)
    return FittedModel(genes, b, stats, model_complexity(genes, complexity_measure))


def model_complexity(genes, measure: str = "expressional") -> int:
    """Sum of the per-gene complexity under the selected measure."""
    if measure == "expressional":
        return sum(expressional_complexity(g) for g in genes)
    if measure == "node_count":
        return sum(node_count(g) for g in genes)
    raise ValueError(f"unknown complexity measure {measure!r}")
