"""k-means with k-means++ restarts, normalized spectral clustering, kernel combiners."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidData, NumericalError
from .kernels import symmetrize

MAX_LLOYD_ITERS = 300
SHIFT_TOL = 1e-8


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k: int
    inertia: float | None = None
    restart_inertias: list = field(default_factory=list)


def _sq_dists(X, C) -> np.ndarray:
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_plus_plus(X, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding; returns indices of the chosen rows."""
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _sq_dists(X, X[chosen])[:, 0]
    d2[chosen] = 0.0
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every remaining point coincides with a chosen center
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(rest))
        chosen.append(idx)
        d2 = np.minimum(d2, _sq_dists(X, X[idx:idx + 1])[:, 0])
        d2[idx] = 0.0
    return np.asarray(chosen)


def _repair_empty(X, labels, centers, d2):
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        own = d2[np.arange(len(labels)), labels].copy()
        own[counts[labels] <= 1] = -1.0
        far = int(own.argmax())
        counts[labels[far]] -= 1
        labels[far] = j
        counts[j] = 1
        centers[j] = X[far]
    return labels


def lloyd(X, centers, max_iters: int = MAX_LLOYD_ITERS, tol: float = SHIFT_TOL):
    """Run Lloyd iterations from ``centers``. Returns (labels, centers, inertia, inertia_trace)."""
    X = np.asarray(X, dtype=float)
    centers = np.array(centers, dtype=float)
    k = centers.shape[0]
    trace = []
    for _ in range(max_iters):
        d2 = _sq_dists(X, centers)
        labels = d2.argmin(axis=1)
        labels = _repair_empty(X, labels, centers, d2)
        new = np.vstack([X[labels == j].mean(axis=0) for j in range(k)])
        trace.append(float(((X - new[labels]) ** 2).sum()))
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break
    d2 = _sq_dists(X, centers)
    labels = _repair_empty(X, d2.argmin(axis=1), centers, d2)
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, centers, inertia, trace


def kmeans(X, k: int, restarts: int = 30, rng_seed: int = 0) -> ClusterAssignment:
    """Best-inertia k-means over ``restarts`` k-means++ seedings (ties keep the earliest)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidData("X must be a nonempty 2-D array")
    if not np.all(np.isfinite(X)):
        raise InvalidData("non-finite coordinates")
    n = X.shape[0]
    if k < 1 or k > n:
        raise InvalidData(f"k={k} must be in [1, {n}]")
    if restarts < 1:
        raise InvalidData("restarts must be positive")
    rng = np.random.default_rng(rng_seed)
    best = None
    inertias = []
    for _ in range(restarts):
        seeds = kmeans_plus_plus(X, k, rng)
        labels, _, inertia, _ = lloyd(X, X[seeds])
        inertias.append(inertia)
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    return ClusterAssignment(best[0], k, best[1], inertias)


def spectral_embedding(K, k: int) -> np.ndarray:
    """Row-normalized top-k eigenvectors of D^{-1/2} K D^{-1/2}.

    These are the bottom-k eigenvectors of the symmetric normalized Laplacian.
    """
    K = symmetrize(K)
    deg = K.sum(axis=1)
    deg = np.maximum(deg, 1e-12 * max(np.abs(deg).max(), 1.0))
    inv_sqrt = 1.0 / np.sqrt(deg)
    N = symmetrize(inv_sqrt[:, None] * K * inv_sqrt[None, :])
    try:
        _, V = np.linalg.eigh(N)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    E = V[:, ::-1][:, :k]
    norms = np.linalg.norm(E, axis=1, keepdims=True)
    return E / np.where(norms > 0, norms, 1.0)


def spectral_cluster(K, k: int, rng_seed: int = 0, restarts: int = 30) -> ClusterAssignment:
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidData("K must be square")
    if k < 1 or k > K.shape[0]:
        raise InvalidData(f"k={k} must be in [1, {K.shape[0]}]")
    result = kmeans(spectral_embedding(K, k), k, restarts, rng_seed)
    return ClusterAssignment(result.labels, k, None)


def combine_kernels(kernels: Sequence, mode: str = "add") -> np.ndarray:
    """Entrywise sum (``add``) or Hadamard product (``product``) of equal-size kernels."""
    kernels = [np.asarray(K, dtype=float) for K in kernels]
    if len(kernels) < 2:
        raise InvalidData("need at least two kernels")
    shape = kernels[0].shape
    if any(K.shape != shape for K in kernels):
        raise InvalidData("kernels differ in shape")
    if mode == "add":
        out = np.sum(kernels, axis=0)
    elif mode == "product":
        out = np.prod(kernels, axis=0)
    else:
        raise InvalidData(f"unknown combine mode {mode!r}")
    return symmetrize(out)

