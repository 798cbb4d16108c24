"""Scikit-learn estimator wrapper around the multigene GP engine."""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .analyze import pareto_front_report
from .dataset import from_arrays
from .evolve import RunConfig, multi_run
from .export import model_equation
from .functions import DEFAULT_FUNCTIONS, make_palette
from .regress import evaluate_model


class MultiGeneRegressor(RegressorMixin, BaseEstimator):
    """Symbolic regression via multigene genetic programming.

    Evolves a population of models, each a weighted sum of expression-tree
    genes plus a bias; gene weights are least-squares fitted on the
    training data each time a model is evaluated. After fit, ``model_``
    holds the best individual and ``predict`` evaluates it.

    Parameters mirror the engine's run configuration; see RunConfig.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> X = rng.uniform(-3, 3, size=(200, 2))
    >>> y = 2 * X[:, 0] + np.cos(X[:, 1])
    >>> est = MultiGeneRegressor(population_size=50, generations=10,
    ...                          random_state=0).fit(X, y)
    >>> est.predict(X).shape
    (200,)
    """

    def __init__(
        self,
        population_size: int = 100,
        generations: int = 30,
        num_runs: int = 1,
        g_max: int = 4,
        max_depth: int = 4,
        function_set: tuple[str, ...] = DEFAULT_FUNCTIONS,
        erc_enabled: bool = True,
        erc_range: tuple[float, float] = (-10.0, 10.0),
        tournament_size: int = 4,
        tournament_mix: tuple[float, float, float] = (0.5, 0.5, 0.0),
        crossover_prob: float = 0.84,
        high_level_fraction: float = 0.2,
        cr: float = 0.5,
        mutation_prob: float = 0.14,
        elitism: int = 1,
        complexity_measure: str = "expressional",
        target_rmse: float = 0.0,
        max_run_seconds: float = math.inf,
        n_jobs: int = 1,
        random_state: int = 0,
    ):
        self.population_size = population_size
        self.generations = generations
        self.num_runs = num_runs
        self.g_max = g_max
        self.max_depth = max_depth
        self.function_set = function_set
        self.erc_enabled = erc_enabled
        self.erc_range = erc_range
        self.tournament_size = tournament_size
        self.tournament_mix = tournament_mix
        self.crossover_prob = crossover_prob
        self.high_level_fraction = high_level_fraction
        self.cr = cr
        self.mutation_prob = mutation_prob
        self.elitism = elitism
        self.complexity_measure = complexity_measure
        self.target_rmse = target_rmse
        self.max_run_seconds = max_run_seconds
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _run_config(self) -> RunConfig:
        return RunConfig(
            population_size=self.population_size,
            max_generations=self.generations,
            max_run_seconds=self.max_run_seconds,
            target_fitness=self.target_rmse,
            g_max=self.g_max,
            max_depth=self.max_depth,
            tournament_size=self.tournament_size,
            tournament_mix=tuple(self.tournament_mix),
            crossover_prob=self.crossover_prob,
            high_level_fraction=self.high_level_fraction,
            cr=self.cr,
            mutation_prob=self.mutation_prob,
            elitism=self.elitism,
            complexity_measure=self.complexity_measure,
            num_runs=self.num_runs,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.n_features_in_ = X.shape[1]
        dataset = from_arrays(X, y)
        palette = make_palette(
            tuple(self.function_set),
            num_inputs=X.shape[1],
            erc_enabled=self.erc_enabled,
            erc_range=tuple(self.erc_range),
        )
        self.population_ = multi_run(self._run_config(), dataset, palette, self.n_jobs)
        best = self.population_.individuals[self.population_.best_index()]
        self.model_ = evaluate_model(best.genes, dataset, self.complexity_measure)
        self.history_ = self.population_.histories
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return self.model_.predict(X)

    @property
    def equation_(self) -> str:
        check_is_fitted(self, "model_")
        return model_equation(self.model_)

    def pareto_front(self, X, y):
        """Front rows (model id, R², complexity, equation) on the given data."""
        check_is_fitted(self, "model_")
        X, y = check_X_y(X, y, y_numeric=True)
        dataset = from_arrays(X, y)
        from .analyze import evaluate_population_models

        models = evaluate_population_models(self.population_, dataset)
        return pareto_front_report(models, "train")
