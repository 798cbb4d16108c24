import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mgsr import tree as T
from mgsr.dataset import assign_splits, from_arrays
from mgsr.functions import CATALOG, make_palette


def f(name, *children):
    return T.Func(CATALOG[name], children)


def v(index):
    return T.Var(index)


def c(value):
    return T.Const(value)


@pytest.fixture
def palette3():
    return make_palette(num_inputs=3)


@pytest.fixture
def palette6():
    return make_palette(num_inputs=6)


def random_genes(palette, rng, max_depth=4, count=1):
    return tuple(
        T.random_tree(palette, int(rng.integers(2, max_depth + 1)), rng,
                      "grow" if rng.random() < 0.5 else "full")
        for _ in range(count)
    )


def equation2_dataset(n=1000, seed=1, test_fraction=0.3):
    """Noise-free rows from y = 0.23 x1 + 0.33 (x1 - x5) + 1.23 x3^2
    - 3.34 cos(x1) + 0.22 over six uniform inputs."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3.0, 3.0, size=(n, 6))
    y = (0.23 * X[:, 0] + 0.33 * (X[:, 0] - X[:, 4])
         + 1.23 * X[:, 2] ** 2 - 3.34 * np.cos(X[:, 0]) + 0.22)
    split = assign_splits(n, (1.0 - test_fraction, 0.0, test_fraction), seed=seed + 1)
    return from_arrays(X, y, split)


@pytest.fixture
def eq2_dataset():
    return equation2_dataset()


@pytest.fixture
def small_dataset():
    rng = np.random.default_rng(7)
    X = rng.uniform(-2.0, 2.0, size=(60, 3))
    y = 1.5 * X[:, 0] - 0.5 * X[:, 1] ** 2 + np.sin(X[:, 2])
    split = assign_splits(60, (0.7, 0.15, 0.15), seed=3)
    return from_arrays(X, y, split)
