"""Building-block functions and palettes for expression trees.

Every evaluator is a pure elementwise map over numpy arrays. Protected
variants are total over finite inputs: they return a finite value at
otherwise-singular points instead of inf/nan. Unprotected variants may
produce non-finite outputs, which the fitness layer treats as an invalid
model rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError

PDIV_EPS = 1e-12


def pdivide(a, b):
    """Protected division: 0 where |denominator| < 1e-12, else the quotient."""
    b = np.asarray(b)
    guarded = np.where(np.abs(b) < PDIV_EPS, 1.0, b)
    return np.where(np.abs(b) < PDIV_EPS, 0.0, np.asarray(a) / guarded)


def divide(a, b):
    """Unprotected division; may produce inf/nan."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.asarray(a) / np.asarray(b)


def plog10(a):
    """Protected log10: log10(|x|), with 0 mapped to 0."""
    a = np.asarray(a)
    absa = np.abs(a)
    guarded = np.where(absa == 0.0, 1.0, absa)
    return np.where(absa == 0.0, 0.0, np.log10(guarded))


def psqrt(a):
    """Protected square root: sqrt(|x|)."""
    return np.sqrt(np.abs(a))


def gauss(a):
    """Gaussian building block exp(-x^2); bounded in (0, 1]."""
    with np.errstate(over="ignore"):
        return np.exp(-np.square(np.asarray(a)))


def negexp(a):
    """exp(-x); overflows to inf for very negative x (unprotected)."""
    with np.errstate(over="ignore"):
        return np.exp(-np.asarray(a))


def _exp(a):
    with np.errstate(over="ignore"):
        return np.exp(np.asarray(a))


def _power(a, b):
    with np.errstate(all="ignore"):
        return np.power(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def iflte(a, b, c, d):
    """If-then-else: c where a <= b, else d."""
    return np.where(np.asarray(a) <= np.asarray(b), c, d)


def gt(a, b):
    """Indicator a > b (1.0 / 0.0)."""
    return (np.asarray(a) > np.asarray(b)).astype(float)


def lt(a, b):
    """Indicator a < b (1.0 / 0.0)."""
    return (np.asarray(a) < np.asarray(b)).astype(float)


def step(a):
    """Unit step: 1.0 where x >= 0, else 0.0."""
    return (np.asarray(a) >= 0.0).astype(float)


def thresh(a, b):
    """Threshold: 1.0 where a >= b, else 0.0."""
    return (np.asarray(a) >= np.asarray(b)).astype(float)


@dataclass(frozen=True)
class FunctionSpec:
    """One tree building block: a named pure elementwise function."""

    name: str
    arity: int
    evaluator: Callable[..., np.ndarray] = field(compare=False, repr=False)
    protected: bool = False

    def __post_init__(self):
        if self.arity < 1:
            raise ConfigurationError(f"function {self.name!r} must have arity >= 1")


def _silent(fn):
    def wrapped(*args):
        with np.errstate(all="ignore"):
            return fn(*args)

    return wrapped


# The full catalog. Defaults for a run are the subset in DEFAULT_FUNCTIONS;
# anything here can be enabled by name in the palette config.
CATALOG: dict[str, FunctionSpec] = {
    spec.name: spec
    for spec in [
        FunctionSpec("plus", 2, _silent(np.add)),
        FunctionSpec("minus", 2, _silent(np.subtract)),
        FunctionSpec("times", 2, _silent(np.multiply)),
        FunctionSpec("divide", 2, divide),
        FunctionSpec("pdivide", 2, pdivide, protected=True),
        FunctionSpec("add3", 3, _silent(lambda a, b, c: a + b + c)),
        FunctionSpec("mult3", 3, _silent(lambda a, b, c: a * b * c)),
        FunctionSpec("tanh", 1, np.tanh, protected=True),
        FunctionSpec("cos", 1, np.cos, protected=True),
        FunctionSpec("sin", 1, np.sin, protected=True),
        FunctionSpec("exp", 1, _exp),
        FunctionSpec("log10", 1, plog10, protected=True),
        FunctionSpec("square", 1, _silent(np.square)),
        FunctionSpec("power", 2, _power),
        FunctionSpec("abs", 1, np.abs, protected=True),
        FunctionSpec("cube", 1, _silent(lambda a: a * a * a)),
        FunctionSpec("sqrt", 1, psqrt, protected=True),
        FunctionSpec("negexp", 1, negexp),
        FunctionSpec("iflte", 4, iflte, protected=True),
        FunctionSpec("neg", 1, np.negative, protected=True),
        FunctionSpec("gt", 2, gt, protected=True),
        FunctionSpec("lt", 2, lt, protected=True),
        FunctionSpec("gauss", 1, gauss, protected=True),
        FunctionSpec("step", 1, step, protected=True),
        FunctionSpec("thresh", 2, thresh, protected=True),
    ]
}

DEFAULT_FUNCTIONS = ("plus", "minus", "times", "pdivide", "tanh", "cos", "sin", "square")


@dataclass(frozen=True)
class Palette:
    """The gene pool of building blocks for one run.

    num_inputs is M: input variables are x1..xM. When erc_enabled, leaves may
    also be ephemeral random constants drawn uniformly from erc_range.
    """

    functions: tuple[FunctionSpec, ...]
    num_inputs: int
    erc_enabled: bool = True
    erc_range: tuple[float, float] = (-10.0, 10.0)

    def __post_init__(self):
        if not self.functions:
            raise ConfigurationError("palette needs at least one function")
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise ConfigurationError("duplicate function names in palette")
        if self.num_inputs < 1:
            raise ConfigurationError("palette needs at least one input variable")
        lo, hi = self.erc_range
        if not lo < hi:
            raise ConfigurationError("erc_range lower bound must be below upper bound")

    def by_name(self, name: str) -> FunctionSpec:
        for f in self.functions:
            if f.name == name:
                return f
        raise ConfigurationError(f"function {name!r} not in palette")

    def by_arity(self, arity: int) -> list[FunctionSpec]:
        return [f for f in self.functions if f.arity == arity]


def make_palette(
    function_names=DEFAULT_FUNCTIONS,
    num_inputs: int = 1,
    erc_enabled: bool = True,
    erc_range: tuple[float, float] = (-10.0, 10.0),
) -> Palette:
    """Build a palette from catalog function names."""
    specs = []
    for name in function_names:
        if name not in CATALOG:
            raise ConfigurationError(
                f"unknown function {name!r}; available: {', '.join(sorted(CATALOG))}"
            )
        specs.append(CATALOG[name])
    return Palette(tuple(specs), num_inputs, erc_enabled, tuple(erc_range))
