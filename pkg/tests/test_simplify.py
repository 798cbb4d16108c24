"""Rewrite-rule simplification and canonical forms."""

import numpy as np

from mgsr import tree as T
from mgsr.export import to_infix
from mgsr.functions import make_palette
from mgsr.simplify import (
    CConst,
    CVar,
    eval_canon,
    simplify,
    simplify_model,
    to_tree,
    variables_used,
)

from conftest import c, f, random_genes, v


def _max_intermediate(tree, X):
    """Per-row maximum magnitude over every subexpression value."""
    with np.errstate(all="ignore"):
        peak = np.abs(T.eval_tree(tree, X))
        if isinstance(tree, T.Func):
            for child in tree.children:
                peak = np.maximum(peak, _max_intermediate(child, X))
    return peak


class TestIdentityRules:
    def test_plus_zero(self):
        assert simplify(f("plus", v(1), c(0.0))).expr == CVar(1)

    def test_times_one(self):
        assert simplify(f("times", v(1), c(1.0))).expr == CVar(1)

    def test_times_zero(self):
        assert simplify(f("times", v(1), c(0.0))).expr == CConst(0.0)

    def test_x_minus_x(self):
        assert simplify(f("minus", f("sin", v(1)), f("sin", v(1)))).expr == CConst(0.0)

    def test_double_negation(self):
        assert simplify(f("neg", f("neg", v(2)))).expr == CVar(2)

    def test_x_over_x_tagged(self):
        s = simplify(f("divide", f("cos", v(1)), f("cos", v(1))))
        assert s.expr == CConst(1.0)
        assert "x/x" in s.caveats

    def test_pdivide_by_zero_constant(self):
        assert simplify(f("pdivide", v(1), c(0.0))).expr == CConst(0.0)

    def test_constant_folding(self):
        assert simplify(f("plus", c(2.0), c(3.0))).expr == CConst(5.0)
        assert simplify(f("sin", c(0.0))).expr == CConst(0.0)

    def test_like_terms_collect(self):
        s = simplify(f("plus", f("sin", v(1)), f("sin", v(1))))
        assert to_infix(s.expr) == "2*sin(x1)"

    def test_square_normalization(self):
        s = simplify(f("times", v(1), v(1)))
        assert to_infix(s.expr) == "x1^2"
        s2 = simplify(f("square", v(1)))
        assert s2.expr == s.expr

    def test_commutative_canonicalization(self):
        a = simplify(f("plus", v(1), v(2))).expr
        b = simplify(f("plus", v(2), v(1))).expr
        assert a == b
        p = simplify(f("times", f("sin", v(1)), v(2))).expr
        q = simplify(f("times", v(2), f("sin", v(1)))).expr
        assert p == q


class TestNumericEquivalence:
    def test_random_trees_agree_with_source(self):
        rng = np.random.default_rng(20)
        pal = make_palette(num_inputs=4)
        X = rng.uniform(-3.0, 3.0, size=(64, 4))
        checked = 0
        for gene in random_genes(pal, rng, max_depth=5, count=1000):
            s = simplify(gene)
            with np.errstate(all="ignore"):
                original = T.eval_tree(gene, X)
                reduced = eval_canon(s.expr, X)
            finite = np.isfinite(original)
            if not finite.any():
                continue
            denom = np.maximum(1.0, np.abs(original[finite]))
            assert (np.abs(reduced[finite] - original[finite]) / denom).max() <= 1e-9
            checked += 1
        assert checked > 900

    def test_full_catalog_trees_agree(self):
        # The full catalog includes power/exp, which produce huge
        # intermediates; the source's own float rounding then swamps a pure
        # relative comparison (the canonical form can cancel exactly where
        # the source rounds at eps * intermediate). Tolerance is therefore
        # scaled by the largest intermediate magnitude per row.
        rng = np.random.default_rng(21)
        from mgsr.functions import CATALOG

        pal = make_palette(tuple(CATALOG), num_inputs=3)
        X = rng.uniform(-2.0, 2.0, size=(64, 3))
        for gene in random_genes(pal, rng, max_depth=4, count=500):
            s = simplify(gene)
            if s.caveats:
                continue
            with np.errstate(all="ignore"):
                original = T.eval_tree(gene, X)
                reduced = eval_canon(s.expr, X)
                scale = np.maximum(1.0, _max_intermediate(gene, X))
            finite = np.isfinite(original) & np.isfinite(scale)
            if not finite.any():
                continue
            assert (np.abs(reduced[finite] - original[finite]) / scale[finite]).max() <= 1e-9


class TestCanonicalIdempotence:
    def test_idempotent_through_tree_roundtrip(self):
        rng = np.random.default_rng(22)
        pal = make_palette(num_inputs=3)
        for gene in random_genes(pal, rng, max_depth=4, count=500):
            once = simplify(gene).expr
            again = simplify(to_tree(once)).expr
            assert once == again


class TestSimplifyModel:
    def test_fig7_style_weighted_model(self):
        # weights [-3.29, 8.86, 0.372] over genes {x2, x3}
        sm = simplify_model((v(2), v(3)), np.array([-3.29, 8.86, 0.372]))
        assert to_infix(sm.expr) == "8.86*x2 + 0.372*x3 - 3.29"

    def test_unit_weight_single_gene(self):
        sm = simplify_model((v(1),), np.array([0.0, 1.0]))
        assert sm.expr == CVar(1)
        assert to_infix(sm.expr) == "x1"

    def test_duplicate_genes_collect(self):
        t = f("sin", v(1))
        sm = simplify_model((t, t), np.array([0.0, 1.5, 2.5]))
        assert to_infix(sm.expr) == "4*sin(x1)"

    def test_tiny_weights_dropped_and_recorded(self):
        sm = simplify_model((v(1), v(2)), np.array([1.0, 1e-15, 2.0]))
        assert sm.dropped_genes == (0,)
        assert to_infix(sm.expr) == "2*x2 + 1"

    def test_model_numeric_equivalence(self):
        rng = np.random.default_rng(23)
        pal = make_palette(num_inputs=3)
        X = rng.uniform(-2, 2, (50, 3))
        for _ in range(100):
            genes = random_genes(pal, rng, count=int(rng.integers(1, 4)))
            weights = rng.normal(size=len(genes) + 1)
            sm = simplify_model(genes, weights)
            with np.errstate(all="ignore"):
                direct = weights[0] + sum(
                    w * T.eval_tree(g, X) for w, g in zip(weights[1:], genes)
                )
                reduced = eval_canon(sm.expr, X)
            finite = np.isfinite(direct)
            denom = np.maximum(1.0, np.abs(direct[finite]))
            assert (np.abs(reduced[finite] - direct[finite]) / denom).max() <= 1e-9


class TestVariablesUsed:
    def test_cancelled_variable_absent(self):
        # x2 cancels: (x1 + x2) - x2
        gene = f("minus", f("plus", v(1), v(2)), v(2))
        s = simplify(gene)
        assert variables_used(s.expr) == {1}

    def test_nested_usage(self):
        gene = f("times", f("sin", v(3)), f("plus", v(1), c(2.0)))
        assert variables_used(simplify(gene).expr) == {1, 3}
