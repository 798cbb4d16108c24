"""Least-squares gene weighting, fitness, and per-split statistics."""

import numpy as np
import pytest

from mgsr.dataset import from_arrays
from mgsr.errors import InvalidModelError
from mgsr.functions import make_palette
from mgsr.regress import (
    INVALID_FITNESS,
    evaluate_model,
    fit_weights,
    fitness,
    gene_response_matrix,
    model_complexity,
    r_squared,
)

from conftest import c, equation2_dataset, f, random_genes, v
from oracles import normal_equation_pinv_weights


class TestGeneResponseMatrix:
    def test_single_gene_identity(self):
        X = np.array([[2.0], [3.0]])
        Gm = gene_response_matrix([v(1)], X)
        assert np.array_equal(Gm, [[1.0, 2.0], [1.0, 3.0]])

    def test_constant_gene_collinear_with_bias_fits(self):
        X = np.zeros((3, 1))
        X[:, 0] = [1.0, 2.0, 3.0]
        Gm = gene_response_matrix([c(5.0)], X)
        assert np.array_equal(Gm[:, 1], [5.0, 5.0, 5.0])
        b = fit_weights(Gm, np.array([1.0, 1.0, 1.0]))  # must not crash
        assert np.allclose(Gm @ b, [1.0, 1.0, 1.0])

    def test_shape(self):
        rng = np.random.default_rng(0)
        pal = make_palette(num_inputs=4)
        genes = random_genes(pal, rng, count=3)
        X = rng.uniform(-2, 2, (50, 4))
        Gm = gene_response_matrix(genes, X)
        assert Gm.shape == (50, 4)
        assert np.array_equal(Gm[:, 0], np.ones(50))


class TestFitWeights:
    def test_exact_interpolation(self):
        Gm = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
        b = fit_weights(Gm, np.array([1.0, 2.0, 3.0]))
        assert np.allclose(b, [1.0, 1.0], atol=1e-12)

    def test_duplicate_columns_match_single_column_predictions(self):
        rng = np.random.default_rng(1)
        t = rng.normal(size=40)
        y = 2.0 * t + 1.0 + rng.normal(scale=0.1, size=40)
        G1 = np.column_stack([np.ones(40), t])
        G2 = np.column_stack([np.ones(40), t, t])
        b1 = fit_weights(G1, y)
        b2 = fit_weights(G2, y)
        assert np.allclose(G1 @ b1, G2 @ b2, atol=1e-10)
        # minimum-norm solution splits the weight across the duplicates
        assert np.allclose(b2[1], b2[2], atol=1e-10)

    def test_matches_normal_equation_oracle(self):
        rng = np.random.default_rng(2)
        for trial in range(100):
            n, g = 50, int(rng.integers(1, 6))
            Gm = np.column_stack([np.ones(n), rng.normal(size=(n, g))])
            if trial % 4 == 0 and g >= 2:  # force collinearity
                Gm[:, 2] = Gm[:, 1]
            y = rng.normal(size=n)
            b = fit_weights(Gm, y)
            expected = normal_equation_pinv_weights(Gm, y)
            denom = max(1.0, np.linalg.norm(expected))
            assert np.linalg.norm(b - expected) / denom <= 1e-8

    def test_nonfinite_raises_invalid_model(self):
        Gm = np.array([[1.0, np.nan], [1.0, 2.0]])
        with pytest.raises(InvalidModelError):
            fit_weights(Gm, np.array([1.0, 2.0]))

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            Gm = np.column_stack([np.ones(30), rng.normal(size=(30, 3))])
            y = rng.normal(size=30)
            b = fit_weights(Gm, y)
            resid = y - Gm @ b
            assert np.linalg.norm(Gm.T @ resid) <= 1e-8 * np.linalg.norm(y)


class TestFitness:
    def test_perfect_fit(self):
        rng = np.random.default_rng(4)
        X = rng.uniform(-2, 2, (30, 2))
        genes = (v(1), f("square", v(2)))
        y = 3.0 + 2.0 * X[:, 0] - 0.5 * X[:, 1] ** 2
        assert fitness(genes, X, y) <= 1e-10

    def test_constant_model_rmse_is_population_std(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(-1, 1, (25, 1))
        y = rng.normal(size=25)
        # constant gene: model reduces to the best constant predictor, the mean
        got = fitness((c(5.0),), X, y)
        assert got == pytest.approx(float(np.std(y)), rel=1e-10)

    def test_nan_gene_gives_sentinel(self):
        X = np.array([[1.0, 0.0], [2.0, 1.0]])
        genes = (f("divide", v(1), v(2)),)
        assert fitness(genes, X, X[:, 0]) == INVALID_FITNESS


class TestEvaluateModel:
    def test_train_only_dataset(self):
        rng = np.random.default_rng(6)
        X = rng.uniform(-1, 1, (20, 2))
        ds = from_arrays(X, X[:, 0])
        m = evaluate_model((v(1),), ds)
        assert set(m.stats) == {"train"}
        assert len(m.weights) == 2

    def test_mean_predictor_r2_zero(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        assert r_squared(y, np.full(4, y.mean())) == pytest.approx(0.0, abs=1e-15)

    def test_eq2_exact_recovery_test_r2(self):
        ds = equation2_dataset(n=400, seed=9)
        genes = (v(1), v(5), f("square", v(3)), f("cos", v(1)))
        m = evaluate_model(genes, ds)
        assert m.stats["test"].r2 == pytest.approx(1.0, abs=1e-9)
        assert m.stats["train"].r2 == pytest.approx(1.0, abs=1e-9)

    def test_complexity_is_sum_over_genes(self):
        genes = (f("plus", v(1), v(2)), v(1))
        m_ec = model_complexity(genes, "expressional")
        assert m_ec == 5 + 1
        assert model_complexity(genes, "node_count") == 3 + 1


class TestRegressionProperties:
    def test_monotone_training_r2_on_append(self):
        rng = np.random.default_rng(7)
        pal = make_palette(num_inputs=3)
        X = rng.uniform(-2, 2, (40, 3))
        y = rng.normal(size=40)
        for _ in range(200):
            genes = random_genes(pal, rng, count=int(rng.integers(1, 4)))
            extra = random_genes(pal, rng, count=1)
            Gm = gene_response_matrix(genes, X)
            if not np.isfinite(Gm).all():
                continue
            col = gene_response_matrix(extra, X)[:, 1]
            if not np.isfinite(col).all():
                continue
            r2_before = r_squared(y, Gm @ fit_weights(Gm, y))
            G2 = np.column_stack([Gm, col])
            r2_after = r_squared(y, G2 @ fit_weights(G2, y))
            assert r2_after >= r2_before - 1e-10

    def test_gmax_one_matches_scaled_regression_oracle(self):
        # direct two-parameter least squares: b1 = cov(t, y)/var(t), b0 = ...
        rng = np.random.default_rng(8)
        X = rng.uniform(-3, 3, (50, 2))
        y = rng.normal(size=50)
        gene = f("sin", v(1))
        t = np.sin(X[:, 0])
        b1 = float(np.cov(t, y, bias=True)[0, 1] / np.var(t))
        b0 = float(y.mean() - b1 * t.mean())
        Gm = gene_response_matrix((gene,), X)
        b = fit_weights(Gm, y)
        assert np.allclose(b, [b0, b1], rtol=1e-9, atol=1e-12)

    def test_scaled_fit_dominates_naive(self):
        rng = np.random.default_rng(9)
        pal = make_palette(num_inputs=2)
        X = rng.uniform(-2, 2, (30, 2))
        y = rng.normal(size=30)
        for _ in range(100):
            gene = random_genes(pal, rng, count=1)
            t = gene_response_matrix(gene, X)[:, 1]
            if not np.isfinite(t).all():
                continue
            naive_rmse = float(np.sqrt(np.mean((y - t) ** 2)))
            assert fitness(gene, X, y) <= naive_rmse + 1e-12

    def test_permutation_covariance(self):
        rng = np.random.default_rng(10)
        pal = make_palette(num_inputs=3)
        X = rng.uniform(-2, 2, (40, 3))
        y = rng.normal(size=40)
        genes = random_genes(pal, rng, count=3)
        perm = [2, 0, 1]
        b = fit_weights(gene_response_matrix(genes, X), y)
        permuted = tuple(genes[i] for i in perm)
        b_p = fit_weights(gene_response_matrix(permuted, X), y)
        assert b_p[0] == pytest.approx(b[0], abs=1e-12)
        for new_pos, old_pos in enumerate(perm):
            assert b_p[new_pos + 1] == pytest.approx(b[old_pos + 1], abs=1e-12)
