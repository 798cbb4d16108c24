"""Scikit-learn estimator API."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from mgsr.estimator import MultiGeneRegressor


def toy_problem(n=150, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3, 3, size=(n, 2))
    y = 2.0 * X[:, 0] + X[:, 1] ** 2
    return X, y


def fast_params(**kw):
    params = dict(population_size=40, generations=8, random_state=0)
    params.update(kw)
    return params


class TestSklearnContract:
    def test_get_set_params_roundtrip(self):
        est = MultiGeneRegressor(**fast_params(g_max=3))
        params = est.get_params()
        assert params["g_max"] == 3
        est2 = MultiGeneRegressor().set_params(**params)
        assert est2.get_params() == params

    def test_clone(self):
        est = MultiGeneRegressor(**fast_params())
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_fit_predict_shapes(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params()).fit(X, y)
        preds = est.predict(X)
        assert preds.shape == (len(y),)
        assert est.n_features_in_ == 2

    def test_unfitted_predict_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            MultiGeneRegressor().predict(np.ones((2, 2)))

    def test_feature_count_checked(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params()).fit(X, y)
        with pytest.raises(ValueError):
            est.predict(np.ones((3, 5)))

    def test_score_is_r2(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params(generations=15)).fit(X, y)
        score = est.score(X, y)
        assert score > 0.9

    def test_pipeline_composition(self):
        X, y = toy_problem(n=100)
        pipe = make_pipeline(StandardScaler(), MultiGeneRegressor(**fast_params()))
        pipe.fit(X, y)
        assert pipe.predict(X).shape == (100,)

    def test_cross_val(self):
        X, y = toy_problem(n=90)
        scores = cross_val_score(MultiGeneRegressor(**fast_params(generations=5)),
                                 X, y, cv=3)
        assert scores.shape == (3,)

    def test_seeded_determinism(self):
        X, y = toy_problem()
        a = MultiGeneRegressor(**fast_params()).fit(X, y)
        b = MultiGeneRegressor(**fast_params()).fit(X, y)
        assert a.equation_ == b.equation_
        assert np.array_equal(a.predict(X), b.predict(X))


class TestEstimatorBehavior:
    def test_recovers_simple_structure(self):
        X, y = toy_problem(n=200)
        est = MultiGeneRegressor(**fast_params(population_size=80, generations=20,
                                               num_runs=2, target_rmse=1e-9)).fit(X, y)
        assert est.score(X, y) > 0.999

    def test_equation_available(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params()).fit(X, y)
        assert isinstance(est.equation_, str) and est.equation_

    def test_history_recorded(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params(num_runs=2)).fit(X, y)
        assert len(est.history_) == 2
        for hist in est.history_:
            assert len(hist) >= 1

    def test_pareto_front_rows(self):
        X, y = toy_problem()
        est = MultiGeneRegressor(**fast_params()).fit(X, y)
        rows = est.pareto_front(X, y)
        assert rows and all(r.complexity >= 1 for r in rows)
