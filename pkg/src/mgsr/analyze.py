"""Post-run analytics: Pareto fronts, filtering, gene catalogs and impact,
model reconstruction, REC curves and run summaries.

Model ids are 1-based positions in the population; gene ids are dense
1..U in catalog discovery order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InvalidModelError, ModelLookupError
from .evolve import GenStats, Population, fast_nondominated_front
from .export import model_equation, to_infix
from .regress import FittedModel, evaluate_model, fit_weights, gene_response_matrix, r_squared
from .simplify import Simplified, simplify, simplify_model, variables_used
from . import tree as T

BLOAT_DELTA_R2 = 1e-3
PROBE_ROWS = 256
PROBE_SEED = 20407
PROBE_TOL = 1e-9


# ---------------------------------------------------------------------------
# population evaluation

def evaluate_population_models(pop: Population, dataset: Dataset) -> list[FittedModel | None]:
    """FittedModel per individual (None where gene outputs are non-finite)."""
    out: list[FittedModel | None] = []
    for ind in pop.individuals:
        try:
            out.append(evaluate_model(ind.genes, dataset, pop.meta.complexity_measure))
        except InvalidModelError:
            out.append(None)
    return out


# ---------------------------------------------------------------------------
# Pareto front report

@dataclass(frozen=True)
class ParetoRow:
    model_id: int  # 1-based population index
    r2: float
    complexity: int
    equation: str


def pareto_front_report(models: list[FittedModel | None], split: str = "train") -> list[ParetoRow]:
    """Front of (1 - R^2, complexity), rows sorted by descending R^2."""
    ids = [i for i, m in enumerate(models) if m is not None and split in m.stats]
    if not ids:
        return []
    points = [(1.0 - models[i].stats[split].r2, models[i].complexity) for i in ids]
    flags = fast_nondominated_front(points)
    rows = [
        ParetoRow(i + 1, models[i].stats[split].r2, models[i].complexity,
                  model_equation(models[i]))
        for i, keep in zip(ids, flags) if keep
    ]
    return sorted(rows, key=lambda r: (-r.r2, r.complexity, r.model_id))


def pareto_front_ids(models: list[FittedModel | None], split: str = "train") -> list[int]:
    return [row.model_id for row in pareto_front_report(models, split)]


# ---------------------------------------------------------------------------
# model filter

@dataclass(frozen=True)
class FilterCriteria:
    min_r2_train: float | None = None
    include_vars: frozenset[int] = frozenset()
    exclude_vars: frozenset[int] = frozenset()
    max_complexity: int | None = None
    min_num_vars: int | None = None
    max_num_vars: int | None = None
    pareto_only: bool = False

    def __post_init__(self):
        if self.include_vars & self.exclude_vars:
            raise ValueError("include_vars and exclude_vars overlap")


def apply_filter(pop: Population, criteria: FilterCriteria, dataset: Dataset) -> Population:
    """Retain exactly the models satisfying every present criterion.

    Variable usage is judged on the simplified model, so a variable that
    cancels out during simplification counts as absent.
    """
    models = evaluate_population_models(pop, dataset)
    front = set(pareto_front_ids(models, "train")) if criteria.pareto_only else None
    keep = []
    for i, model in enumerate(models):
        if model is None:
            continue
        if criteria.min_r2_train is not None and model.r2_train < criteria.min_r2_train:
            continue
        if criteria.max_complexity is not None and model.complexity > criteria.max_complexity:
            continue
        used = variables_used(simplify_model(model.genes, model.weights).expr)
        if criteria.include_vars and not criteria.include_vars <= used:
            continue
        if criteria.exclude_vars and criteria.exclude_vars & used:
            continue
        if criteria.min_num_vars is not None and len(used) < criteria.min_num_vars:
            continue
        if criteria.max_num_vars is not None and len(used) > criteria.max_num_vars:
            continue
        if front is not None and (i + 1) not in front:
            continue
        keep.append(pop.individuals[i].copy())
    return Population(keep, pop.generation, [list(h) for h in pop.histories],
                      dict(pop.cache), pop.meta)


# ---------------------------------------------------------------------------
# unique-gene catalog

@dataclass
class CatalogEntry:
    gene_id: int
    genotype: T.Node
    simplified: Simplified
    infix: str
    member_models: set[int] = field(default_factory=set)


@dataclass
class GeneCatalog:
    entries: list[CatalogEntry]
    key_to_id: dict[str, int]  # canonical genotype key -> gene id

    def __len__(self):
        return len(self.entries)

    def by_id(self, gene_id: int) -> CatalogEntry:
        if not 1 <= gene_id <= len(self.entries):
            raise ModelLookupError(f"unknown gene id {gene_id}")
        return self.entries[gene_id - 1]

    def ids_for_genes(self, genes) -> list[int]:
        return [self.key_to_id[T.canonical_key(g)] for g in genes]


def probe_matrix(num_inputs: int) -> np.ndarray:
    rng = np.random.default_rng(PROBE_SEED)
    return rng.uniform(-5.0, 5.0, size=(PROBE_ROWS, num_inputs))


def unique_genes(pop: Population) -> GeneCatalog:
    """Catalog the population's unique genes.

    Four steps: extract every genotype (weights ignored), drop duplicate
    genotypes, simplify the survivors, drop duplicates of the simplified
    form. The structural dedup is backed by a numeric probe so semantic
    duplicates the rewrite rules miss still merge.
    """
    probe = probe_matrix(pop.meta.num_inputs)
    entries: list[CatalogEntry] = []
    probe_outputs: list[np.ndarray] = []
    by_structure: dict[str, int] = {}   # genotype key -> entry index
    by_canon: dict = {}                 # simplified expr -> entry index

    for model_idx, ind in enumerate(pop.individuals):
        model_id = model_idx + 1
        for gene in ind.genes:
            key = T.canonical_key(gene)
            idx = by_structure.get(key)
            if idx is None:
                idx = _place_gene(gene, key, entries, probe_outputs, by_canon, probe)
                by_structure[key] = idx
            entries[idx].member_models.add(model_id)

    catalog = GeneCatalog(entries, {})
    for i, entry in enumerate(entries):
        entry.gene_id = i + 1
    catalog.key_to_id = {k: entries[i].gene_id for k, i in by_structure.items()}
    return catalog


def _place_gene(gene, key, entries, probe_outputs, by_canon, probe):
    simplified = simplify(gene)
    idx = by_canon.get(simplified.expr)
    if idx is not None:
        return idx
    with np.errstate(all="ignore"):
        out = T.eval_tree(gene, probe)
    for i, existing in enumerate(probe_outputs):
        if np.allclose(existing, out, rtol=PROBE_TOL, atol=PROBE_TOL, equal_nan=True):
            by_canon[simplified.expr] = i
            return i
    entries.append(CatalogEntry(0, gene, simplified, to_infix(simplified.expr)))
    probe_outputs.append(out)
    by_canon[simplified.expr] = len(entries) - 1
    return len(entries) - 1


# ---------------------------------------------------------------------------
# gene impact

@dataclass(frozen=True)
class PresentGeneImpact:
    gene_id: int
    position: int  # 0-based position within the model
    r2_if_removed: float
    delta_r2: float
    bloat: bool


@dataclass(frozen=True)
class AbsentGeneImpact:
    gene_id: int
    r2_if_added: float
    gain: float


@dataclass(frozen=True)
class GeneImpact:
    model_id: int
    r2_full: float
    present: tuple[PresentGeneImpact, ...]
    absent: tuple[AbsentGeneImpact, ...]


def gene_impact(model_id: int, catalog: GeneCatalog, pop: Population,
                dataset: Dataset, bloat_threshold: float = BLOAT_DELTA_R2,
                include_absent: bool = True) -> GeneImpact:
    """Leave-one-out and add-one-in training R² for one model.

    Every number is a full least-squares refit of the reduced or extended
    gene set, not a weight-zeroing shortcut. The add-one-in scan over the
    whole catalog is the expensive part; callers tabulating many models can
    switch it off.
    """
    ind = _individual(pop, model_id)
    X, y = dataset.X_train, dataset.y_train
    Gm = gene_response_matrix(ind.genes, X)
    if not np.isfinite(Gm).all():
        raise InvalidModelError(f"model {model_id} has non-finite gene outputs")
    r2_full = _refit_r2(Gm, y)
    gene_ids = catalog.ids_for_genes(ind.genes)

    present = []
    for pos, gid in enumerate(gene_ids):
        reduced = np.delete(Gm, pos + 1, axis=1)
        r2_removed = _refit_r2(reduced, y)
        delta = r2_full - r2_removed
        present.append(PresentGeneImpact(gid, pos, r2_removed, delta,
                                         delta < bloat_threshold))

    absent = []
    if include_absent:
        in_model = set(gene_ids)
        for entry in catalog.entries:
            if entry.gene_id in in_model:
                continue
            with np.errstate(all="ignore"):
                col = T.eval_tree(entry.genotype, X)
            if not np.isfinite(col).all():
                continue
            extended = np.column_stack([Gm, col])
            r2_added = _refit_r2(extended, y)
            absent.append(AbsentGeneImpact(entry.gene_id, r2_added, r2_added - r2_full))

    return GeneImpact(model_id, r2_full, tuple(present), tuple(absent))


def _refit_r2(Gm: np.ndarray, y: np.ndarray) -> float:
    b = fit_weights(Gm, y)
    return r_squared(y, Gm @ b)


def _individual(pop: Population, model_id: int):
    if not 1 <= model_id <= len(pop.individuals):
        raise ModelLookupError(f"unknown model id {model_id}")
    return pop.individuals[model_id - 1]


# ---------------------------------------------------------------------------
# model reconstruction

def model_from_genes(gene_ids, catalog: GeneCatalog, dataset: Dataset,
                     g_max: int | None = None,
                     complexity_measure: str = "expressional") -> FittedModel:
    """Build and fit a fresh model from catalog gene ids."""
    ids = list(gene_ids)
    if not ids:
        raise ModelLookupError("need at least one gene id")
    if g_max is not None and len(ids) > g_max:
        raise ModelLookupError(f"{len(ids)} genes exceed the g_max limit of {g_max}")
    genes = tuple(catalog.by_id(g).genotype for g in ids)
    return evaluate_model(genes, dataset, complexity_measure)


# ---------------------------------------------------------------------------
# REC curves

@dataclass(frozen=True)
class RECCurve:
    model_id: int
    split: str
    eps: np.ndarray
    proportion: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.eps.tolist(), self.proportion.tolist()))


def rec_points(errors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """REC curve support points from absolute errors: the tolerance grid is
    the sorted unique errors (plus 0), proportion(eps) = #{|e| <= eps} / N."""
    errors = np.abs(np.asarray(errors, dtype=float))
    eps = np.unique(np.concatenate(([0.0], errors)))
    proportion = np.searchsorted(np.sort(errors), eps, side="right") / len(errors)
    return eps, proportion


def rec_curve(model: FittedModel, dataset: Dataset, split: str = "train",
              model_id: int = 0) -> RECCurve:
    _, y = dataset.rows(split)
    eps, proportion = rec_points(y - model.stats[split].predictions)
    return RECCurve(model_id, split, eps, proportion)


def rec_curves(models_with_ids, dataset: Dataset, split: str = "train") -> list[RECCurve]:
    return [rec_curve(m, dataset, split, model_id=i) for i, m in models_with_ids]


# ---------------------------------------------------------------------------
# run summary

def run_summary(history: list[GenStats]) -> dict[str, list]:
    """Per-generation series: log10 of the best RMSE, plain mean RMSE."""
    return {
        "generation": [h.generation for h in history],
        "log10_best_rmse": [
            math.log10(h.best_rmse) if 0 < h.best_rmse < math.inf else None
            for h in history
        ],
        "mean_rmse": [h.mean_rmse if math.isfinite(h.mean_rmse) else None for h in history],
        "invalid_count": [h.invalid_count for h in history],
        "best_r2": [h.best_r2 if math.isfinite(h.best_r2) else None for h in history],
    }


# ---------------------------------------------------------------------------
# model lookup keywords

def resolve_model_id(token: str, models: list[FittedModel | None]) -> int:
    """Resolve a numeric id or the keywords best / testbest (1-based)."""
    if token == "best":
        candidates = [(m.rmse_train, i + 1) for i, m in enumerate(models) if m is not None]
        if not candidates:
            raise ModelLookupError("population has no valid models")
        return min(candidates)[1]
    if token == "testbest":
        candidates = [
            (-m.stats["test"].r2, i + 1)
            for i, m in enumerate(models)
            if m is not None and "test" in m.stats
        ]
        if not candidates:
            raise ModelLookupError("no test split available for keyword 'testbest'")
        return min(candidates)[1]
    try:
        model_id = int(token)
    except ValueError as exc:
        raise ModelLookupError(f"bad model id {token!r}") from exc
    if not 1 <= model_id <= len(models):
        raise ModelLookupError(f"unknown model id {model_id}")
    if models[model_id - 1] is None:
        raise ModelLookupError(f"model {model_id} is invalid (non-finite gene outputs)")
    return model_id
