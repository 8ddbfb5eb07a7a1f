"""Kernel evaluation, graph Laplacians, block indexing and PSD utilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CoverageError, DegenerateBandwidth, InvalidData, NumericalError

EPS_PSD = 1e-8

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass(frozen=True)
class DataView:
    """One view of a common instance set.

    ``values`` has one row per instance in the full index space; rows whose
    ``present`` flag is False carry NaN (or stale values) and must not be read.
    """

    values: np.ndarray
    present: np.ndarray
    feature_kinds: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        present = np.array(self.present, dtype=bool)
        if values.ndim != 2:
            raise InvalidData(f"values must be 2-D, got shape {values.shape}")
        if present.shape != (values.shape[0],):
            raise InvalidData("present mask length must equal number of rows")
        if not present.any():
            raise InvalidData("a view needs at least one present row")
        if not np.all(np.isfinite(values[present])):
            raise InvalidData("present rows must have finite entries")
        kinds = tuple(self.feature_kinds) or (CONTINUOUS,) * values.shape[1]
        if len(kinds) != values.shape[1]:
            raise InvalidData("feature_kinds length must equal number of columns")
        for k in kinds:
            if k not in (CONTINUOUS, DISCRETE):
                raise InvalidData(f"unknown feature kind {k!r}")
        values.setflags(write=False)
        present.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "feature_kinds", kinds)

    @property
    def n_total(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def is_complete(self) -> bool:
        return bool(self.present.all())

    def available(self) -> np.ndarray:
        return self.values[self.present]

    def with_presence(self, present) -> "DataView":
        present = np.asarray(present, dtype=bool)
        values = self.values.copy()
        values[~present] = np.nan
        return DataView(values, present, self.feature_kinds)


@dataclass(frozen=True)
class IndexPartition:
    """Instances present in both views (c), only in the first (m1), only in the second (m2)."""

    c: np.ndarray
    m1: np.ndarray
    m2: np.ndarray

    def __post_init__(self):
        for name in ("c", "m1", "m2"):
            arr = np.sort(np.asarray(getattr(self, name), dtype=np.intp).ravel())
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        everything = np.concatenate([self.c, self.m1, self.m2])
        if len(np.unique(everything)) != len(everything):
            raise InvalidData("c, m1 and m2 must be pairwise disjoint")
        if len(everything) and not np.array_equal(np.sort(everything), np.arange(len(everything))):
            raise InvalidData("c, m1 and m2 must cover 0..n-1")

    @classmethod
    def from_views(cls, view_x: DataView, view_y: DataView) -> "IndexPartition":
        if view_x.n_total != view_y.n_total:
            raise InvalidData("views are not row-aligned")
        px, py = view_x.present, view_y.present
        if np.any(~px & ~py):
            raise CoverageError("some instances are missing from both views")
        return cls(np.flatnonzero(px & py), np.flatnonzero(px & ~py), np.flatnonzero(~px & py))

    @property
    def n_total(self) -> int:
        return len(self.c) + len(self.m1) + len(self.m2)

    @property
    def order(self) -> np.ndarray:
        """Canonical ordering: c, then m1, then m2."""
        return np.concatenate([self.c, self.m1, self.m2])


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    bandwidth: float | str = "median"
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rbf", "linear", "polynomial"):
            raise InvalidData(f"unknown kernel kind {self.kind!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "median":
                raise InvalidData("bandwidth must be a positive number or 'median'")
        elif not self.bandwidth > 0:
            raise InvalidData("bandwidth must be positive")
        if int(self.degree) != self.degree or self.degree < 1:
            raise InvalidData("degree must be a positive integer")


def standardize(view: DataView) -> DataView:
    """Z-score continuous columns with statistics over present rows only."""
    values = view.values.copy()
    avail = view.available()
    for j, kind in enumerate(view.feature_kinds):
        if kind != CONTINUOUS:
            continue
        mu = avail[:, j].mean()
        sd = avail[:, j].std()
        values[:, j] = (values[:, j] - mu) / (sd if sd > 0 else 1.0)
    return DataView(values, view.present, view.feature_kinds)


def median_bandwidth(X) -> float:
    """Median pairwise Euclidean distance between rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise InvalidData("median heuristic needs at least 2 rows")
    sigma = float(np.median(pdist(X)))
    if sigma <= 0:
        raise DegenerateBandwidth("median pairwise distance is zero")
    return sigma


def resolve_bandwidth(X, spec: KernelSpec) -> float | None:
    if spec.kind != "rbf":
        return None
    if spec.bandwidth == "median":
        return median_bandwidth(X)
    return float(spec.bandwidth)


def symmetrize(M) -> np.ndarray:
    """Bit-exact symmetric part; (a + b) == (b + a) in IEEE arithmetic."""
    M = np.asarray(M, dtype=float)
    return (M + M.T) * 0.5


def compute_kernel(X, spec: KernelSpec = KernelSpec(), bandwidth: float | None = None) -> np.ndarray:
    """Dense kernel matrix over the rows of ``X``.

    ``bandwidth`` overrides the one implied by ``spec``; pass it when several
    kernels must share a bandwidth (e.g. present rows vs. an imputed matrix).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidData("X must be 2-D")
    if not np.all(np.isfinite(X)):
        raise InvalidData("kernel input contains non-finite values")
    if spec.kind == "rbf":
        sigma = bandwidth if bandwidth is not None else resolve_bandwidth(X, spec)
        sq = squareform(pdist(X, "sqeuclidean"))
        return np.exp(-sq / (2.0 * sigma**2))
    gram = X @ X.T
    if spec.kind == "polynomial":
        gram = (gram + spec.coef0) ** spec.degree
    # matmul is not guaranteed to be bit-symmetric
    upper = np.triu(gram)
    return upper + np.triu(gram, 1).T


def graph_laplacian(K) -> np.ndarray:
    """L = D - K with D the diagonal of row sums."""
    K = np.asarray(K, dtype=float)
    L = -K
    L[np.diag_indices_from(L)] += K.sum(axis=1)
    return L


def block(M, rows, cols) -> np.ndarray:
    M = np.asarray(M)
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    n_r, n_c = M.shape
    if rows.size and (rows.min() < 0 or rows.max() >= n_r):
        raise IndexError("row index out of range")
    if cols.size and (cols.min() < 0 or cols.max() >= n_c):
        raise IndexError("column index out of range")
    return M[np.ix_(rows, cols)]


def psd_floor(M) -> np.ndarray:
    """Project a symmetric matrix onto the PSD cone by clipping eigenvalues at zero."""
    M = symmetrize(M)
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    if w.size == 0 or w[0] >= 0:
        return M
    return symmetrize((V * np.clip(w, 0, None)) @ V.T)


def is_psd(K, eps: float = EPS_PSD) -> bool:
    w = np.linalg.eigvalsh(symmetrize(K))
    return bool(w[0] >= -eps * max(1.0, w[-1]))


def check_kernel(K, eps: float = EPS_PSD) -> None:
    """Raise InvalidData unless ``K`` is square, exactly symmetric and PSD within ``eps``."""
    K = np.asarray(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidData("kernel must be square")
    if not np.array_equal(K, K.T):
        raise InvalidData("kernel is not exactly symmetric")
    if not is_psd(K, eps):
        raise InvalidData("kernel is not PSD within tolerance")


def views_cover(views: Sequence[DataView]) -> bool:
    present = np.vstack([v.present for v in views])
    return bool(present.any(axis=0).all())
