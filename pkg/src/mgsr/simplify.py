"""Rewrite-rule algebraic simplification to a canonical form.

The canonical form is a bounded normalization, not a CAS: constants fold,
identities vanish (x+0, x*1, x*0, x-x, double negation), sums and products
flatten into n-ary nodes with sorted operands, like terms collect with
numeric coefficients, and square/cube/power normalize to integer powers.
There is no factoring and no trigonometric rewriting; semantic duplicates
the rules miss are caught downstream by a numeric probe.

Term order (total, stable across platforms): node kinds rank
variable < power < product < call < sum < constant; within a kind,
variables order by index, calls by name then arguments, recursively.

The only value-changing rules are quotient cancellations (x/x -> 1,
pdivide(x, x) -> 1), which are reported via a caveat tag: they differ from
the source where the denominator vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .functions import CATALOG, PDIV_EPS
from . import tree as T

MAX_FOLD_POWER = 16
WEIGHT_DROP_EPS = 1e-12


class CExpr:
    __slots__ = ()


@dataclass(frozen=True)
class CConst(CExpr):
    value: float


@dataclass(frozen=True)
class CVar(CExpr):
    index: int


@dataclass(frozen=True)
class CCall(CExpr):
    name: str
    args: tuple[CExpr, ...]


@dataclass(frozen=True)
class CPow(CExpr):
    base: CExpr
    power: int


@dataclass(frozen=True)
class CProd(CExpr):
    factors: tuple[CExpr, ...]


@dataclass(frozen=True)
class CSum(CExpr):
    terms: tuple[tuple[float, CExpr], ...]
    const: float


def sort_key(e: CExpr):
    if isinstance(e, CVar):
        return (0, e.index)
    if isinstance(e, CPow):
        return (1, sort_key(e.base), e.power)
    if isinstance(e, CProd):
        return (2, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, CCall):
        return (3, e.name, tuple(sort_key(a) for a in e.args))
    if isinstance(e, CSum):
        return (4, tuple((sort_key(m), c) for c, m in e.terms), e.const)
    return (5, e.value)


# ---------------------------------------------------------------------------
# smart constructors (each enforces the canonical invariants)

def make_sum(items, const: float = 0.0) -> CExpr:
    """items: iterable of (coefficient, CExpr); flattens, folds, collects."""
    acc: dict = {}
    monomials: dict = {}
    const = float(const)
    stack = list(items)
    while stack:
        coeff, e = stack.pop()
        if coeff == 0.0:
            continue
        if isinstance(e, CConst):
            const += coeff * e.value
        elif isinstance(e, CSum):
            const += coeff * e.const
            stack.extend((coeff * c2, m) for c2, m in e.terms)
        else:
            k = sort_key(e)
            acc[k] = acc.get(k, 0.0) + coeff
            monomials[k] = e
    terms = tuple(
        (acc[k], monomials[k]) for k in sorted(acc) if acc[k] != 0.0
    )
    if not terms:
        return CConst(const)
    if len(terms) == 1 and const == 0.0 and terms[0][0] == 1.0:
        return terms[0][1]
    return CSum(terms, const)


def scale(e: CExpr, k: float) -> CExpr:
    return make_sum([(k, e)])


def make_prod(factors) -> CExpr:
    """n-ary product; scalars bubble up into an enclosing sum coefficient."""
    coeff = 1.0
    powers: dict = {}
    bases: dict = {}
    stack = list(factors)
    while stack:
        f = stack.pop()
        if isinstance(f, CConst):
            coeff *= f.value
        elif isinstance(f, CSum) and len(f.terms) == 1 and f.const == 0.0:
            coeff *= f.terms[0][0]
            stack.append(f.terms[0][1])
        elif isinstance(f, CProd):
            stack.extend(f.factors)
        elif isinstance(f, CPow):
            k = sort_key(f.base)
            powers[k] = powers.get(k, 0) + f.power
            bases[k] = f.base
        else:
            k = sort_key(f)
            powers[k] = powers.get(k, 0) + 1
            bases[k] = f
    if coeff == 0.0:
        return CConst(0.0)
    out = []
    for k in sorted(powers):
        p = powers[k]
        if p == 0:
            continue
        out.append(bases[k] if p == 1 else CPow(bases[k], p))
    if not out:
        return CConst(coeff)
    result = out[0] if len(out) == 1 else CProd(tuple(out))
    return scale(result, coeff)


def make_pow(e: CExpr, n: int) -> CExpr:
    if n == 0:
        return CConst(1.0)
    if n == 1:
        return e
    if isinstance(e, CConst):
        with np.errstate(all="ignore"):
            v = float(np.power(e.value, float(n)))
        if np.isfinite(v):
            return CConst(v)
        return CCall("power", (e, CConst(float(n))))
    if isinstance(e, CPow):
        return make_pow(e.base, e.power * n)
    if isinstance(e, CProd):
        return make_prod([make_pow(f, n) for f in e.factors])
    if isinstance(e, CSum) and len(e.terms) == 1 and e.const == 0.0:
        c, m = e.terms[0]
        with np.errstate(all="ignore"):
            cn = float(np.power(c, float(n)))
        if np.isfinite(cn):
            return scale(make_pow(m, n), cn)
    return CPow(e, n)


# ---------------------------------------------------------------------------
# canonicalization of expression trees

@dataclass(frozen=True)
class Simplified:
    expr: CExpr
    caveats: frozenset[str]


def simplify(tree: T.Node) -> Simplified:
    """Canonicalize a tree. Value-preserving wherever the source is defined,
    except quotient cancellations, which are tagged in caveats."""
    caveats: set[str] = set()
    expr = _canon(tree, caveats)
    return Simplified(expr, frozenset(caveats))


def _canon(node: T.Node, caveats: set[str]) -> CExpr:
    if isinstance(node, T.Const):
        return CConst(node.value)
    if isinstance(node, T.Var):
        return CVar(node.index)
    name = node.spec.name
    args = [_canon(c, caveats) for c in node.children]
    if name == "plus":
        return make_sum([(1.0, args[0]), (1.0, args[1])])
    if name == "add3":
        return make_sum([(1.0, a) for a in args])
    if name == "minus":
        return make_sum([(1.0, args[0]), (-1.0, args[1])])
    if name == "neg":
        return scale(args[0], -1.0)
    if name in ("times", "mult3"):
        return make_prod(args)
    if name == "square":
        return make_pow(args[0], 2)
    if name == "cube":
        return make_pow(args[0], 3)
    if name == "power":
        exp = args[1]
        if isinstance(exp, CConst) and float(exp.value).is_integer() \
                and abs(exp.value) <= MAX_FOLD_POWER:
            return make_pow(args[0], int(exp.value))
        return _fold_or_call(name, args)
    if name == "divide":
        num, den = args
        if num == den and not isinstance(num, CConst):
            caveats.add("x/x")
            return CConst(1.0)
        if isinstance(den, CConst):
            if den.value != 0.0:
                return scale(num, 1.0 / den.value)
            return _fold_or_call(name, args)
        return make_prod([num, make_pow(den, -1)])
    if name == "pdivide":
        num, den = args
        if num == CConst(0.0):
            return CConst(0.0)
        if isinstance(den, CConst):
            if abs(den.value) < PDIV_EPS:
                return CConst(0.0)
            return scale(num, 1.0 / den.value)
        if num == den:
            caveats.add("x/x")
            return CConst(1.0)
        return CCall(name, tuple(args))
    return _fold_or_call(name, args)


def _fold_or_call(name: str, args) -> CExpr:
    if all(isinstance(a, CConst) for a in args):
        spec = CATALOG[name]
        with np.errstate(all="ignore"):
            v = spec.evaluator(*[np.array([a.value]) for a in args])
        v = float(np.asarray(v)[0])
        if np.isfinite(v):
            return CConst(v)
    return CCall(name, tuple(args))


# ---------------------------------------------------------------------------
# weighted model simplification

@dataclass(frozen=True)
class SimplifiedModel:
    expr: CExpr
    caveats: frozenset[str]
    dropped_genes: tuple[int, ...]  # 0-based gene positions with |weight| < 1e-12


def simplify_model(genes, weights) -> SimplifiedModel:
    """Canonicalize b0 + sum(b_i * gene_i) into a single expression."""
    weights = np.asarray(weights, dtype=float)
    caveats: set[str] = set()
    items = []
    dropped = []
    for i, gene in enumerate(genes):
        b = float(weights[i + 1])
        if abs(b) < WEIGHT_DROP_EPS:
            dropped.append(i)
            continue
        items.append((b, _canon(gene, caveats)))
    expr = make_sum(items, float(weights[0]))
    return SimplifiedModel(expr, frozenset(caveats), tuple(dropped))


# ---------------------------------------------------------------------------
# canonical-form utilities

def eval_canon(e: CExpr, X: np.ndarray) -> np.ndarray:
    """Numeric evaluation of a canonical expression over the rows of X."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    with np.errstate(all="ignore"):
        return _eval(e, X, n)


def _eval(e, X, n):
    if isinstance(e, CConst):
        return np.full(n, e.value)
    if isinstance(e, CVar):
        return X[:, e.index - 1]
    if isinstance(e, CCall):
        return np.asarray(
            CATALOG[e.name].evaluator(*[_eval(a, X, n) for a in e.args]), dtype=float
        )
    if isinstance(e, CPow):
        return np.power(_eval(e.base, X, n), float(e.power))
    if isinstance(e, CProd):
        return reduce(np.multiply, (_eval(f, X, n) for f in e.factors))
    out = np.full(n, e.const)
    for c, m in e.terms:
        out = out + c * _eval(m, X, n)
    return out


def to_tree(e: CExpr) -> T.Node:
    """Rebuild an expression tree from a canonical form (for round-trips)."""
    if isinstance(e, CConst):
        return T.Const(e.value)
    if isinstance(e, CVar):
        return T.Var(e.index)
    if isinstance(e, CCall):
        return T.Func(CATALOG[e.name], [to_tree(a) for a in e.args])
    if isinstance(e, CPow):
        return T.Func(CATALOG["power"], [to_tree(e.base), T.Const(float(e.power))])
    if isinstance(e, CProd):
        nodes = [to_tree(f) for f in e.factors]
        return reduce(lambda a, b: T.Func(CATALOG["times"], [a, b]), nodes)
    parts = []
    for c, m in e.terms:
        if c == 1.0:
            parts.append(to_tree(m))
        elif c == -1.0:
            parts.append(T.Func(CATALOG["neg"], [to_tree(m)]))
        else:
            parts.append(T.Func(CATALOG["times"], [T.Const(c), to_tree(m)]))
    if e.const != 0.0 or not parts:
        parts.append(T.Const(e.const))
    return reduce(lambda a, b: T.Func(CATALOG["plus"], [a, b]), parts)


def variables_used(e: CExpr) -> set[int]:
    if isinstance(e, CVar):
        return {e.index}
    if isinstance(e, CCall):
        return set().union(*(variables_used(a) for a in e.args)) if e.args else set()
    if isinstance(e, CPow):
        return variables_used(e.base)
    if isinstance(e, CProd):
        return set().union(*(variables_used(f) for f in e.factors))
    if isinstance(e, CSum):
        out: set[int] = set()
        for _, m in e.terms:
            out |= variables_used(m)
        return out
    return set()
