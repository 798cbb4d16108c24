"""Tabular datasets with train/validation/test splits.

CSV dialect: header row required, '.' decimal separator, response column
named by the caller, optional ``split`` column with values train/val/test.
Without a split column rows are assigned by a seeded shuffle using the
configured fractions (default 70/15/15).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError

SPLITS = ("train", "val", "test")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    split: np.ndarray  # one label per row, values in SPLITS
    var_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.split = np.asarray(self.split, dtype=object)
        if self.X.ndim != 2 or self.X.shape[1] < 1:
            raise DataError("X must be an N x M matrix with M >= 1")
        n, m = self.X.shape
        if self.y.shape != (n,):
            raise DataError("y length must equal the number of rows of X")
        if self.split.shape != (n,):
            raise DataError("split labels must cover every row")
        bad = set(self.split) - set(SPLITS)
        if bad:
            raise DataError(f"unknown split labels: {sorted(bad)}")
        if not np.isfinite(self.X).all() or not np.isfinite(self.y).all():
            raise DataError("dataset contains non-finite entries")
        if int(np.sum(self.split == "train")) < 2:
            raise DataError("need at least 2 training rows")
        if not self.var_names:
            self.var_names = tuple(f"x{i + 1}" for i in range(m))
        elif len(self.var_names) != m:
            raise DataError("var_names length must match the number of columns")

    @property
    def num_inputs(self) -> int:
        return self.X.shape[1]

    @property
    def splits_present(self) -> tuple[str, ...]:
        return tuple(s for s in SPLITS if np.any(self.split == s))

    def rows(self, split: str) -> tuple[np.ndarray, np.ndarray]:
        mask = self.split == split
        return self.X[mask], self.y[mask]

    @property
    def X_train(self) -> np.ndarray:
        return self.X[self.split == "train"]

    @property
    def y_train(self) -> np.ndarray:
        return self.y[self.split == "train"]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update(np.ascontiguousarray(self.y).tobytes())
        h.update(",".join(self.split.tolist()).encode())
        return "sha256:" + h.hexdigest()


def from_arrays(X, y, split=None, var_names=None) -> Dataset:
    """Wrap in-memory arrays; all rows are training rows unless labelled."""
    X = np.asarray(X, dtype=float)
    if split is None:
        split = np.full(X.shape[0], "train", dtype=object)
    return Dataset(X, np.asarray(y, dtype=float), split, tuple(var_names or ()))


def assign_splits(
    n: int, fractions=(0.70, 0.15, 0.15), seed: int = 0
) -> np.ndarray:
    """Seeded shuffled split assignment by fractions (train, val, test)."""
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError("split fractions must be three values summing to 1")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    labels = np.empty(n, dtype=object)
    labels[order[:n_train]] = "train"
    labels[order[n_train : n_train + n_val]] = "val"
    labels[order[n_train + n_val :]] = "test"
    return labels


_SPLIT_ALIASES = {
    "train": "train",
    "training": "train",
    "val": "val",
    "validation": "val",
    "test": "test",
    "testing": "test",
}


def load_csv(
    path,
    response: str,
    split_column: str | None = "split",
    fractions=(0.70, 0.15, 0.15),
    seed: int = 0,
    extra_paths: dict[str, str] | None = None,
) -> Dataset:
    """Load a dataset from CSV.

    extra_paths maps split names to additional CSV files (same columns),
    e.g. ``{"val": "val.csv", "test": "test.csv"}`` alongside a
    train-only main file.
    """
    frames = [(None, _read_csv(path))]
    for split_name, extra in (extra_paths or {}).items():
        if split_name not in SPLITS:
            raise DataError(f"unknown split {split_name!r}")
        frames.append((split_name, _read_csv(extra)))

    parts_X, parts_y, parts_split = [], [], []
    var_names: tuple[str, ...] | None = None
    for forced_split, df in frames:
        if response not in df.columns:
            raise DataError(f"response column {response!r} not in CSV header")
        has_split_col = split_column is not None and split_column in df.columns
        feature_cols = [
            c for c in df.columns if c != response and c != (split_column or "")
        ]
        if not feature_cols:
            raise DataError("no input variable columns found")
        names = tuple(feature_cols)
        if var_names is None:
            var_names = names
        elif names != var_names:
            raise DataError("split files disagree on input columns")
        try:
            X = df[feature_cols].to_numpy(dtype=float)
            y = df[response].to_numpy(dtype=float)
        except (ValueError, TypeError) as exc:
            raise DataError(f"non-numeric data in {path}: {exc}") from exc
        if forced_split is not None:
            labels = np.full(len(df), forced_split, dtype=object)
        elif has_split_col:
            try:
                labels = np.array(
                    [_SPLIT_ALIASES[str(v).strip().lower()] for v in df[split_column]],
                    dtype=object,
                )
            except KeyError as exc:
                raise DataError(f"bad split label {exc.args[0]!r}") from exc
        elif len(frames) > 1:
            labels = np.full(len(df), "train", dtype=object)
        else:
            labels = assign_splits(len(df), fractions, seed)
        parts_X.append(X)
        parts_y.append(y)
        parts_split.append(labels)

    return Dataset(
        np.vstack(parts_X),
        np.concatenate(parts_y),
        np.concatenate(parts_split),
        var_names or (),
    )


def _read_csv(path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=0, decimal=".")
    except FileNotFoundError as exc:
        raise DataError(f"dataset file not found: {path}") from exc
    except Exception as exc:  # pandas parse errors
        raise DataError(f"could not parse CSV {path}: {exc}") from exc
