"""Dataset loading, random feature splits, and alternating missingness injection."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidData, ParseError, SchemaError
from .kernels import CONTINUOUS, DISCRETE, DataView, IndexPartition

DISCRETE_MAX_DISTINCT = 10
SEEDS_ENV = "COKL_SEEDS_PATH"


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    feature_kinds: tuple
    feature_names: tuple = ()
    label_names: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=int)
        if X.ndim != 2 or X.shape[0] < 2:
            raise InvalidData("need a 2-D feature matrix with at least 2 rows")
        if y.shape != (X.shape[0],):
            raise InvalidData("labels must have one entry per row")
        if not np.all(np.isfinite(X)):
            raise InvalidData("features must be finite")
        if len(self.feature_kinds) != X.shape[1]:
            raise InvalidData("feature_kinds length must match number of columns")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_kinds", tuple(self.feature_kinds))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return len(np.unique(self.labels))

    def as_view(self, columns=None) -> DataView:
        cols = np.arange(self.features.shape[1]) if columns is None else np.asarray(columns)
        return DataView(self.features[:, cols], np.ones(self.n, dtype=bool),
                        tuple(self.feature_kinds[c] for c in cols))


@dataclass(frozen=True)
class MissingnessPlan:
    missing_rate: float
    rng_seed: int
    n_views: int
    # instance index -> view it is deleted from, in deletion order
    missing: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    assignment: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))

    def presence(self, n: int) -> np.ndarray:
        """Boolean (n_views, n) presence matrix."""
        present = np.ones((self.n_views, n), dtype=bool)
        present[self.assignment, self.missing] = False
        return present


def infer_kinds(features, overrides=None, names=()) -> tuple:
    overrides = dict(overrides or {})
    kinds = []
    for j in range(features.shape[1]):
        name = names[j] if j < len(names) else str(j)
        if name in overrides:
            kind = overrides[name]
        elif str(j) in overrides:
            kind = overrides[str(j)]
        else:
            kind = DISCRETE if len(np.unique(features[:, j])) <= DISCRETE_MAX_DISTINCT else CONTINUOUS
        if kind not in (CONTINUOUS, DISCRETE):
            raise SchemaError(f"unknown feature kind {kind!r} for column {name!r}")
        kinds.append(kind)
    return tuple(kinds)


def _encode_labels(raw):
    try:
        keys = sorted(set(raw), key=float)
    except ValueError:
        keys = sorted(set(raw))
    lookup = {k: i for i, k in enumerate(keys)}
    return np.array([lookup[v] for v in raw], dtype=int), tuple(keys)


def _split_line(line: str, delimiter: str):
    if delimiter == "whitespace":
        return line.split()
    return next(csv.reader([line], delimiter=delimiter))


def _read_table(path: Path, delimiter: str):
    with path.open(encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in _split_line(lines[0], delimiter)]
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in _split_line(line, delimiter)]
        if len(cells) != len(header):
            raise ParseError(f"{path}: row {r} has {len(cells)} cells, expected {len(header)}", row=r)
        rows.append((r, cells))
    return header, rows


def _parse_numeric(path, header, rows, idx) -> np.ndarray:
    out = np.empty((len(rows), len(idx)))
    for k, (r, cells) in enumerate(rows):
        for j, i in enumerate(idx):
            try:
                val = float(cells[i])
            except ValueError:
                raise ParseError(f"{path}: row {r}, column {header[i]!r}: cannot parse {cells[i]!r}",
                                 row=r, column=header[i]) from None
            if not np.isfinite(val):
                raise ParseError(f"{path}: row {r}, column {header[i]!r}: non-finite value",
                                 row=r, column=header[i])
            out[k, j] = val
    return out


def load_csv(path, label_column: str, kind_overrides=None, delimiter: str = ",",
             columns: Sequence[str] | None = None) -> LabeledDataset:
    """Read a headed CSV file; every column except ``label_column`` must be numeric.

    ``delimiter="whitespace"`` splits on runs of blanks. ``columns`` restricts
    the features to the named subset, in that order.
    """
    path = Path(path)
    header, rows = _read_table(path, delimiter)
    if label_column not in header:
        raise SchemaError(f"{path}: label column {label_column!r} not in header {header}")
    li = header.index(label_column)
    feat_names = [h for i, h in enumerate(header) if i != li]
    if columns is not None:
        unknown = [c for c in columns if c not in feat_names]
        if unknown:
            raise SchemaError(f"{path}: unknown columns {unknown}")
        feat_names = list(columns)
    features = _parse_numeric(path, header, rows, [header.index(h) for h in feat_names])
    labels, names = _encode_labels([cells[li] for _, cells in rows])
    kinds = infer_kinds(features, kind_overrides, feat_names)
    return LabeledDataset(features, labels, kinds, tuple(feat_names), names)


def load_view_csv(path, delimiter: str = ",", kind_overrides=None) -> DataView:
    """A headed, label-free feature file as one complete view."""
    path = Path(path)
    header, rows = _read_table(path, delimiter)
    features = _parse_numeric(path, header, rows, list(range(len(header))))
    kinds = infer_kinds(features, kind_overrides, header)
    return DataView(features, np.ones(len(rows), dtype=bool), kinds)


SEEDS_COLUMNS = ("area", "perimeter", "compactness", "kernel_length", "kernel_width",
                 "asymmetry", "groove_length")


def load_seeds(path) -> LabeledDataset:
    """Load the UCI seeds data, either the raw whitespace-separated file or a headed CSV."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        first = fh.readline()
    try:
        [float(t) for t in first.split()]
        raw = True
    except ValueError:
        raw = False
    if not raw:
        header = next(csv.reader([first]))
        label = header[-1].strip()
        return load_csv(path, label, {c.strip(): CONTINUOUS for c in header[:-1]})
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 8:
        raise SchemaError(f"{path}: expected 8 columns, got shape {data.shape}")
    labels, names = _encode_labels([str(int(v)) for v in data[:, 7]])
    return LabeledDataset(data[:, :7], labels, (CONTINUOUS,) * 7, SEEDS_COLUMNS, names)


def find_seeds(search=(".",)) -> Path | None:
    """Locate a local copy of the seeds data, if any."""
    env = os.environ.get(SEEDS_ENV)
    if env:
        return Path(env) if Path(env).is_file() else None
    for root in search:
        for name in ("data/seeds_dataset.txt", "data/seeds.csv", "seeds_dataset.txt"):
            p = Path(root) / name
            if p.is_file():
                return p
    return None


def split_features(ds: LabeledDataset, n_views: int, rng_seed: int) -> list:
    """Random disjoint column partition into views whose sizes differ by at most one."""
    d = ds.features.shape[1]
    if n_views < 1 or n_views > d:
        raise InvalidData(f"n_views={n_views} must be in [1, {d}]")
    perm = np.random.default_rng(rng_seed).permutation(d)
    return [ds.as_view(np.sort(part)) for part in np.array_split(perm, n_views)]


def plan_missing(n: int, n_views: int, rate: float, rng_seed: int) -> MissingnessPlan:
    if not 0 <= rate < 1:
        raise InvalidData(f"missing rate {rate} must be in [0, 1)")
    if n_views < 2 and rate > 0:
        raise InvalidData("deleting instances needs at least two views")
    n_missing = int(round(rate * n))
    # choice without replacement returns the selection in random order
    missing = np.random.default_rng(rng_seed).choice(n, n_missing, replace=False).astype(np.intp)
    assignment = np.arange(n_missing, dtype=np.intp) % max(n_views, 1)
    return MissingnessPlan(rate, rng_seed, n_views, missing, assignment)


def inject_missing(views: Sequence[DataView], rate: float, rng_seed: int):
    """Delete round(rate * n) random instances, alternating the view each is deleted from.

    Returns ``(views, partition)``; ``partition`` is the two-view IndexPartition
    and is None when there are more than two views.
    """
    views = list(views)
    if not views:
        raise InvalidData("no views given")
    n = views[0].n_total
    if any(v.n_total != n for v in views):
        raise InvalidData("views are not row-aligned")
    if any(not v.is_complete for v in views):
        raise InvalidData("inject_missing expects complete views")
    plan = plan_missing(n, len(views), rate, rng_seed)
    present = plan.presence(n)
    out = [v.with_presence(p) for v, p in zip(views, present)]
    partition = IndexPartition.from_views(*out) if len(out) == 2 else None
    return out, partition


def latent_blobs(n_per_class: int = 70, n_classes: int = 3, view_dims=(4, 3),
                 latent_dim: int = 2, separation: float = 3.0, noise: float = 0.5,
                 nonlinear: bool = False, rng_seed: int = 0):
    """Synthetic multi-view data sharing a class-structured latent variable.

    Each view is a random linear map of the latent point plus independent
    noise (optionally passed through tanh). Returns ``(views, labels)`` with
    complete views.
    """
    rng = np.random.default_rng(rng_seed)
    centers = rng.normal(scale=separation, size=(n_classes, latent_dim))
    labels = np.repeat(np.arange(n_classes), n_per_class)
    z = centers[labels] + rng.normal(size=(labels.size, latent_dim))
    views = []
    for d in view_dims:
        W = rng.normal(size=(latent_dim, d))
        X = z @ W / np.sqrt(latent_dim)
        if nonlinear:
            X = np.tanh(X / X.std())
        X = X + noise * X.std() * rng.normal(size=X.shape)
        views.append(DataView(X, np.ones(labels.size, dtype=bool)))
    return views, labels


def views_dataset(views: Sequence[DataView], labels) -> LabeledDataset:
    """Column-stack complete views into one LabeledDataset."""
    X = np.hstack([v.values for v in views])
    kinds = sum((v.feature_kinds for v in views), ())
    return LabeledDataset(X, labels, kinds)
