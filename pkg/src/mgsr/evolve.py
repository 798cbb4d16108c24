"""The multigene GP engine.

Individuals hold 1..g_max genes (expression trees); gene order carries no
meaning. Evolution is a generational loop with tournament selection
(regular / Pareto / lexicographic mix), rate-based high-level crossover
exchanging whole genes, standard subtree crossover on single genes,
six mutation operators, elitism and fitness caching keyed on the
order-insensitive multiset of gene structures.

The breeding loop is sequential on one master RNG; fitness evaluation is
pure, so distributing it over threads cannot change any result.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .errors import ConfigurationError, MgsrError
from .functions import Palette
from . import tree as T
from .regress import INVALID_FITNESS, fitness, fitness_from_matrix, model_complexity

FITNESS_TIE_EPS = 1e-12


@dataclass
class Individual:
    genes: tuple[T.Node, ...]
    fitness: float | None = None
    complexity: int | None = None

    def cache_key(self) -> tuple[str, ...]:
        return tuple(sorted(T.canonical_key(g) for g in self.genes))

    def copy(self) -> "Individual":
        return Individual(self.genes, self.fitness, self.complexity)


@dataclass(frozen=True)
class RunConfig:
    population_size: int = 100
    max_generations: int = 50
    max_run_seconds: float = math.inf
    target_fitness: float = 0.0
    g_max: int = 4
    max_depth: int = 4
    tournament_size: int = 4
    # probabilities of (regular, pareto, lexicographic) tournaments
    tournament_mix: tuple[float, float, float] = (0.5, 0.5, 0.0)
    crossover_prob: float = 0.84
    high_level_fraction: float = 0.2
    cr: float = 0.5
    mutation_prob: float = 0.14
    mutation_operator_weights: tuple[float, ...] = (0.4, 0.2, 0.1, 0.1, 0.1, 0.1)
    elitism: int = 1
    complexity_measure: str = "expressional"
    num_runs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if self.tournament_size < 2:
            raise ConfigurationError("tournament_size must be >= 2")
        if self.g_max < 1:
            raise ConfigurationError("g_max must be >= 1")
        if self.max_depth < 1:
            raise ConfigurationError("max_depth must be >= 1")
        if not 0 < self.cr < 1:
            raise ConfigurationError("cr must lie strictly between 0 and 1")
        if len(self.tournament_mix) != 3 or abs(sum(self.tournament_mix) - 1) > 1e-9:
            raise ConfigurationError("tournament_mix must be 3 probabilities summing to 1")
        if any(p < 0 or p > 1 for p in self.tournament_mix):
            raise ConfigurationError("tournament_mix entries must be in [0, 1]")
        if len(self.mutation_operator_weights) != 6:
            raise ConfigurationError("mutation_operator_weights needs 6 entries")
        if min(self.mutation_operator_weights) < 0 or sum(self.mutation_operator_weights) <= 0:
            raise ConfigurationError("mutation_operator_weights must be non-negative, not all zero")
        if self.crossover_prob + self.mutation_prob > 1 + 1e-9:
            raise ConfigurationError("crossover_prob + mutation_prob must not exceed 1")
        if self.complexity_measure not in ("expressional", "node_count"):
            raise ConfigurationError("complexity_measure must be 'expressional' or 'node_count'")
        if self.max_generations < 0 or self.num_runs < 1 or self.elitism < 0:
            raise ConfigurationError("max_generations >= 0, num_runs >= 1, elitism >= 0 required")


@dataclass(frozen=True)
class GenStats:
    generation: int
    best_rmse: float
    mean_rmse: float  # invalid (+inf) individuals excluded
    best_r2: float
    invalid_count: int


@dataclass
class PopulationMeta:
    dataset_fingerprint: str
    num_inputs: int
    complexity_measure: str
    function_names: tuple[str, ...]


@dataclass
class Population:
    individuals: list[Individual]
    generation: int
    histories: list[list[GenStats]]
    cache: dict[tuple[str, ...], float]
    meta: PopulationMeta

    @property
    def history(self) -> list[GenStats]:
        return self.histories[0]

    def best_index(self) -> int:
        return _best_index(self.individuals)


class MergeError(MgsrError):
    code = "merge"


def _best_index(individuals) -> int:
    best = 0
    for i, ind in enumerate(individuals[1:], start=1):
        if _beats(ind, individuals[best]):
            best = i
    return best


def _beats(a: Individual, b: Individual) -> bool:
    if a.fitness != b.fitness:
        return a.fitness < b.fitness
    return a.complexity < b.complexity


# ---------------------------------------------------------------------------
# initialization

def unique_random_genes(palette, n_genes, max_depth, rng, attempts_per_gene=10):
    """Ramped half-and-half genes, retrying duplicates within an individual."""
    genes: list[T.Node] = []
    seen: set[str] = set()
    for _ in range(n_genes):
        gene = None
        for _ in range(attempts_per_gene):
            depth_limit = int(rng.integers(2, max_depth + 1)) if max_depth > 1 else 1
            method = "grow" if rng.random() < 0.5 else "full"
            candidate = T.random_tree(palette, depth_limit, rng, method)
            key = T.canonical_key(candidate)
            if key not in seen:
                gene = candidate
                seen.add(key)
                break
        if gene is None:  # retry budget exhausted; accept the duplicate
            gene = candidate
        genes.append(gene)
    return tuple(genes)


def init_population(cfg: RunConfig, palette: Palette, rng: np.random.Generator,
                    meta: PopulationMeta | None = None) -> Population:
    individuals = []
    for _ in range(cfg.population_size):
        n_genes = int(rng.integers(1, cfg.g_max + 1))
        individuals.append(Individual(unique_random_genes(palette, n_genes, cfg.max_depth, rng)))
    meta = meta or PopulationMeta("", palette.num_inputs, cfg.complexity_measure,
                                  tuple(f.name for f in palette.functions))
    return Population(individuals, 0, [[]], {}, meta)


# ---------------------------------------------------------------------------
# selection

def fast_nondominated_front(points) -> np.ndarray:
    """Boolean membership flags of the first front; both objectives minimized.

    Dominance: <= in both objectives and < in at least one. Two objectives
    only.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an n x 2 array of objective pairs")
    f1 = pts[:, 0][:, None]
    f2 = pts[:, 1][:, None]
    le = (f1.T <= f1) & (f2.T <= f2)          # le[i, j]: j weakly dominates i
    lt = (f1.T < f1) | (f2.T < f2)
    dominated = (le & lt).any(axis=1)
    return ~dominated


def select_parent(pop_individuals, cfg: RunConfig, rng: np.random.Generator) -> Individual:
    """One tournament; the tournament type is drawn per selection event.

    Entrants are drawn without replacement (when the population allows),
    so a size-P tournament sees P distinct individuals.
    """
    n = len(pop_individuals)
    if cfg.tournament_size <= n:
        entrants_idx = rng.choice(n, size=cfg.tournament_size, replace=False)
    else:
        entrants_idx = rng.integers(n, size=cfg.tournament_size)
    entrants = [pop_individuals[i] for i in entrants_idx]
    u = rng.random()
    p_regular, p_pareto, _ = cfg.tournament_mix
    if u < p_regular:
        return min(entrants, key=lambda ind: ind.fitness)
    if u < p_regular + p_pareto:
        points = [(ind.fitness, ind.complexity) for ind in entrants]
        flags = fast_nondominated_front(points)
        front = [ind for ind, keep in zip(entrants, flags) if keep]
        return front[int(rng.integers(len(front)))]
    # lexicographic: best fitness, near-ties resolved by lower complexity
    best_fit = min(ind.fitness for ind in entrants)
    tied = [ind for ind in entrants if ind.fitness - best_fit <= FITNESS_TIE_EPS]
    return min(tied, key=lambda ind: ind.complexity)


# ---------------------------------------------------------------------------
# crossover

def draw_exchange_masks(n1: int, n2: int, cr: float, rng: np.random.Generator):
    """Independent Bernoulli(cr) move decisions, one per parent gene."""
    return rng.random(n1) <= cr, rng.random(n2) <= cr


def rate_based_exchange(genes1, genes2, mask1, mask2):
    """Apply the exchange masks: flagged genes move to the other offspring.

    Offspring keep their own genes in order, with arrivals appended in the
    donor's order. May produce empty or over-long offspring; see
    repair_empty / repair_gene_count.
    """
    stay1 = [g for g, move in zip(genes1, mask1) if not move]
    move1 = [g for g, move in zip(genes1, mask1) if move]
    stay2 = [g for g, move in zip(genes2, mask2) if not move]
    move2 = [g for g, move in zip(genes2, mask2) if move]
    return stay1 + move2, stay2 + move1


def repair_empty(o1: list, o2: list, rng: np.random.Generator):
    """Donate one random gene from the sibling when an offspring is empty."""
    if not o1 and o2:
        o1.append(o2.pop(int(rng.integers(len(o2)))))
    elif not o2 and o1:
        o2.append(o1.pop(int(rng.integers(len(o1)))))
    return o1, o2


def repair_gene_count(genes: list, g_max: int, rng: np.random.Generator) -> list:
    """Delete uniformly random genes until the g_max constraint holds."""
    while len(genes) > g_max:
        genes.pop(int(rng.integers(len(genes))))
    return genes


def high_level_crossover(p1: Individual, p2: Individual, cfg: RunConfig,
                         rng: np.random.Generator):
    mask1, mask2 = draw_exchange_masks(len(p1.genes), len(p2.genes), cfg.cr, rng)
    o1, o2 = rate_based_exchange(p1.genes, p2.genes, mask1, mask2)
    o1, o2 = repair_empty(o1, o2, rng)
    o1 = repair_gene_count(o1, cfg.g_max, rng)
    o2 = repair_gene_count(o2, cfg.g_max, rng)
    return Individual(tuple(o1)), Individual(tuple(o2))


def subtree_crossover(g1: T.Node, g2: T.Node, max_depth: int,
                      rng: np.random.Generator, retries: int = 10):
    """Standard GP subtree crossover with reject-and-retry depth repair.

    After `retries` failed attempts the parent gene is copied unchanged.
    """
    c1 = _crossed_gene(g1, g2, max_depth, rng, retries)
    c2 = _crossed_gene(g2, g1, max_depth, rng, retries)
    return c1, c2


def _crossed_gene(receiver, donor, max_depth, rng, retries):
    for _ in range(retries):
        cut = int(rng.integers(T.node_count(receiver)))
        graft = T.subtree_at(donor, int(rng.integers(T.node_count(donor))))
        child = T.replace_subtree(receiver, cut, graft)
        if T.depth(child) <= max_depth:
            return child
    return receiver


def low_level_crossover(p1: Individual, p2: Individual, cfg: RunConfig,
                        rng: np.random.Generator):
    """Subtree crossover between one randomly chosen gene of each parent."""
    i1 = int(rng.integers(len(p1.genes)))
    i2 = int(rng.integers(len(p2.genes)))
    c1, c2 = subtree_crossover(p1.genes[i1], p2.genes[i2], cfg.max_depth, rng)
    genes1 = list(p1.genes)
    genes2 = list(p2.genes)
    genes1[i1] = c1
    genes2[i2] = c2
    return Individual(tuple(genes1)), Individual(tuple(genes2))


# ---------------------------------------------------------------------------
# mutation

def mutate(ind: Individual, cfg: RunConfig, palette: Palette,
           rng: np.random.Generator) -> Individual:
    """Mutate one uniformly random gene with one of six operators.

    Operators: (1) subtree replacement, (2) single-node substitution,
    (3) ERC Gaussian perturbation, (4) ERC replacement, (5) shrink to a
    leaf, (6) input-variable swap. An inapplicable operator falls through
    to (1).
    """
    gi = int(rng.integers(len(ind.genes)))
    gene = ind.genes[gi]
    weights = np.asarray(cfg.mutation_operator_weights, dtype=float)
    op = int(rng.choice(6, p=weights / weights.sum())) + 1
    mutated = _apply_mutation(gene, op, cfg, palette, rng)
    genes = list(ind.genes)
    genes[gi] = mutated
    return Individual(tuple(genes))


def _apply_mutation(gene, op, cfg, palette, rng):
    nodes = list(T.iter_nodes(gene))
    if op == 2:
        i = int(rng.integers(len(nodes)))
        node = nodes[i]
        if isinstance(node, T.Func):
            alternatives = [f for f in palette.by_arity(node.spec.arity)
                            if f.name != node.spec.name]
            if alternatives:
                spec = alternatives[int(rng.integers(len(alternatives)))]
                return T.replace_subtree(gene, i, T.Func(spec, node.children))
            op = 1
        else:
            return T.replace_subtree(gene, i, T.random_leaf(palette, rng))
    if op == 3:
        const_idx = [i for i, n in enumerate(nodes) if isinstance(n, T.Const)]
        if const_idx:
            i = const_idx[int(rng.integers(len(const_idx)))]
            lo, hi = palette.erc_range
            sigma = 0.1 * (hi - lo)
            value = nodes[i].value + rng.normal(0.0, sigma)
            return T.replace_subtree(gene, i, T.Const(value))
        op = 1
    if op == 4:
        const_idx = [i for i, n in enumerate(nodes) if isinstance(n, T.Const)]
        if const_idx:
            i = const_idx[int(rng.integers(len(const_idx)))]
            lo, hi = palette.erc_range
            return T.replace_subtree(gene, i, T.Const(rng.uniform(lo, hi)))
        op = 1
    if op == 5:
        internal = [i for i, n in enumerate(nodes) if isinstance(n, T.Func)]
        if internal:
            i = internal[int(rng.integers(len(internal)))]
            return T.replace_subtree(gene, i, T.random_leaf(palette, rng))
        op = 1
    if op == 6:
        var_idx = [i for i, n in enumerate(nodes) if isinstance(n, T.Var)]
        if var_idx:
            i = var_idx[int(rng.integers(len(var_idx)))]
            new_index = int(rng.integers(1, palette.num_inputs + 1))
            if palette.num_inputs > 1:
                while new_index == nodes[i].index:
                    new_index = int(rng.integers(1, palette.num_inputs + 1))
            return T.replace_subtree(gene, i, T.Var(new_index))
        op = 1
    # operator 1: replace a random subtree with a fresh random tree
    target = int(rng.integers(len(nodes)))
    node_depth = _depth_of(gene, target)
    budget = max(1, cfg.max_depth - node_depth + 1)
    return T.replace_subtree(gene, target, T.random_tree(palette, budget, rng, "grow"))


def _depth_of(tree, target_index):
    """Depth (1-based) of the pre-order target node within the tree."""
    counter = [0]

    def walk(node, d):
        idx = counter[0]
        counter[0] += 1
        if idx == target_index:
            return d
        if isinstance(node, T.Func):
            for child in node.children:
                found = walk(child, d + 1)
                if found:
                    return found
        return 0

    return walk(tree, 1)


# ---------------------------------------------------------------------------
# evaluation

def evaluate_population(pop: Population, dataset: Dataset, cfg: RunConfig,
                        n_threads: int = 1,
                        gene_outputs: dict | None = None,
                        fitness_fn=None) -> None:
    """Fill in fitness/complexity for every individual, cache-aware.

    Cache misses are evaluated (in parallel when n_threads > 1; evaluation
    must be pure) and inserted in population order, so the cache contents
    do not depend on the thread count. fitness_fn is the plugin hook for
    non-regression objectives: any pure ``fn(genes, dataset) -> float``
    (lower is better, +inf for invalid) replaces the RMSE fitness.
    """
    X, y = dataset.X_train, dataset.y_train
    misses: list[tuple[int, tuple[str, ...]]] = []
    for i, ind in enumerate(pop.individuals):
        if ind.complexity is None:
            ind.complexity = model_complexity(ind.genes, cfg.complexity_measure)
        if ind.fitness is not None:
            continue
        key = ind.cache_key()
        if key in pop.cache:
            ind.fitness = pop.cache[key]
        else:
            misses.append((i, key))

    def compute(item):
        i, _ = item
        if fitness_fn is not None:
            return fitness_fn(pop.individuals[i].genes, dataset)
        return _cached_fitness(pop.individuals[i].genes, X, y, gene_outputs)

    if n_threads > 1 and len(misses) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(compute, misses))
    else:
        results = [compute(item) for item in misses]

    for (i, key), value in zip(misses, results):
        pop.individuals[i].fitness = value
        if key not in pop.cache:
            pop.cache[key] = value


def _cached_fitness(genes, X, y, gene_outputs):
    if gene_outputs is None:
        return fitness(genes, X, y)
    cols = [np.ones(X.shape[0])]
    for g in genes:
        key = T.canonical_key(g)
        out = gene_outputs.get(key)
        if out is None:
            out = T.eval_tree(g, X)
            gene_outputs[key] = out
        cols.append(out)
    return fitness_from_matrix(np.column_stack(cols), y)


def record_generation(pop: Population, dataset: Dataset) -> GenStats:
    fits = np.array([ind.fitness for ind in pop.individuals])
    finite = fits[np.isfinite(fits)]
    best_idx = pop.best_index()
    best = pop.individuals[best_idx]
    y = dataset.y_train
    sst = float(np.sum(np.square(y - y.mean())))
    if best.fitness is not None and np.isfinite(best.fitness) and sst > 0:
        best_r2 = 1.0 - (best.fitness ** 2) * len(y) / sst
    else:
        best_r2 = float("-inf")
    stats = GenStats(
        generation=pop.generation,
        best_rmse=float(fits.min()) if len(fits) else INVALID_FITNESS,
        mean_rmse=float(finite.mean()) if len(finite) else INVALID_FITNESS,
        best_r2=best_r2,
        invalid_count=int(np.sum(~np.isfinite(fits))),
    )
    pop.histories[-1].append(stats)
    return stats


# ---------------------------------------------------------------------------
# the generational loop

def run(cfg: RunConfig, dataset: Dataset, palette: Palette,
        n_threads: int = 1, fitness_fn=None) -> Population:
    """Execute one seeded evolutionary run and return the final population.

    The engine is independent of the regression interpretation: pass
    fitness_fn to plug in a different objective over multigene individuals.
    """
    if palette.num_inputs != dataset.num_inputs:
        raise ConfigurationError(
            f"palette expects {palette.num_inputs} inputs, dataset has {dataset.num_inputs}"
        )
    rng = np.random.default_rng(cfg.seed)
    meta = PopulationMeta(dataset.fingerprint(), palette.num_inputs,
                          cfg.complexity_measure, tuple(f.name for f in palette.functions))
    started = time.monotonic()
    gene_outputs: dict[str, np.ndarray] = {}

    pop = init_population(cfg, palette, rng, meta)
    evaluate_population(pop, dataset, cfg, n_threads, gene_outputs, fitness_fn)
    record_generation(pop, dataset)

    while not _terminated(pop, cfg, started):
        offspring = _breed(pop, cfg, palette, rng)
        pop.individuals = offspring
        pop.generation += 1
        if len(gene_outputs) > 50_000:
            gene_outputs.clear()
        evaluate_population(pop, dataset, cfg, n_threads, gene_outputs, fitness_fn)
        record_generation(pop, dataset)
    return pop


def _terminated(pop: Population, cfg: RunConfig, started: float) -> bool:
    if pop.generation >= cfg.max_generations:
        return True
    if time.monotonic() - started > cfg.max_run_seconds:
        return True
    best = min(ind.fitness for ind in pop.individuals)
    return best <= cfg.target_fitness


def _breed(pop: Population, cfg: RunConfig, palette: Palette,
           rng: np.random.Generator) -> list[Individual]:
    size = cfg.population_size
    ranked = sorted(range(len(pop.individuals)),
                    key=lambda i: (pop.individuals[i].fitness,
                                   pop.individuals[i].complexity, i))
    new: list[Individual] = [pop.individuals[i].copy() for i in ranked[: cfg.elitism]]
    inds = pop.individuals
    while len(new) < size:
        u = rng.random()
        if u < cfg.crossover_prob:
            p1 = select_parent(inds, cfg, rng)
            p2 = select_parent(inds, cfg, rng)
            if rng.random() < cfg.high_level_fraction:
                o1, o2 = high_level_crossover(p1, p2, cfg, rng)
            else:
                o1, o2 = low_level_crossover(p1, p2, cfg, rng)
            new.append(o1)
            if len(new) < size:
                new.append(o2)
        elif u < cfg.crossover_prob + cfg.mutation_prob:
            new.append(mutate(select_parent(inds, cfg, rng), cfg, palette, rng))
        else:
            new.append(select_parent(inds, cfg, rng).copy())
    return new


# ---------------------------------------------------------------------------
# multi-run support

def multi_run(cfg: RunConfig, dataset: Dataset, palette: Palette,
              n_threads: int = 1) -> Population:
    """num_runs independent runs seeded seed, seed+1, ... merged afterwards."""
    pops = []
    for i in range(cfg.num_runs):
        run_cfg = replace(cfg, seed=cfg.seed + i, num_runs=1)
        pops.append(run(run_cfg, dataset, palette, n_threads))
    return merge_populations(pops)


def merge_populations(pops: list[Population]) -> Population:
    """Concatenate runs over the same dataset/palette/measure.

    Histories are retained per source run; caches are unioned (entries are
    deterministic, so collisions agree).
    """
    if not pops:
        raise MergeError("nothing to merge")
    first = pops[0].meta
    for p in pops[1:]:
        if (p.meta.dataset_fingerprint != first.dataset_fingerprint
                or p.meta.complexity_measure != first.complexity_measure
                or p.meta.num_inputs != first.num_inputs):
            raise MergeError("populations come from different datasets or configs")
    individuals = [ind for p in pops for ind in p.individuals]
    histories = [h for p in pops for h in p.histories]
    cache: dict = {}
    for p in pops:
        for k, v in p.cache.items():
            cache.setdefault(k, v)
    return Population(individuals, max(p.generation for p in pops),
                      histories, cache, first)
