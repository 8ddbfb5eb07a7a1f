"""Kernel CCA in the dual, plus centering and PCA helpers.

The regularized problem

    max  a^T Kx Ky b   s.t.  a^T (Kx + kx I)^2 a = 1,  b^T (Ky + ky I)^2 b = 1

is reduced to an SVD: with Rx = Kx + kx I and Px = Rx^{-1} Kx (both diagonal
in the eigenbasis of Kx), the canonical correlations are the singular values
of Px Py, and alpha = Rx^{-1} u for each left singular vector u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidData, NumericalError, RankDeficient
from .kernels import symmetrize


@dataclass(frozen=True)
class KccaConfig:
    # None: two components in kcca(), the cluster count in the pipeline
    n_components: int | None = None
    # absolute ridge; None means kappa_scale * trace(K) / n, per kernel
    kappa: float | None = None
    kappa_scale: float = 1.0
    eig_tol: float = 1e-10

    def __post_init__(self):
        if self.n_components is not None and (
                int(self.n_components) != self.n_components or self.n_components < 1):
            raise InvalidData("n_components must be a positive integer")
        if self.kappa is not None and self.kappa < 0:
            raise InvalidData("kappa must be nonnegative")
        if self.kappa_scale < 0:
            raise InvalidData("kappa_scale must be nonnegative")
        if not self.eig_tol > 0:
            raise InvalidData("eig_tol must be positive")

    def ridge_for(self, K) -> float:
        if self.kappa is not None:
            return float(self.kappa)
        return float(self.kappa_scale * np.trace(K) / K.shape[0])


@dataclass
class KccaSolution:
    alpha: np.ndarray
    beta: np.ndarray
    correlations: np.ndarray
    x_projected: np.ndarray
    y_projected: np.ndarray
    kappa_x: float
    kappa_y: float


def center_kernel(K) -> np.ndarray:
    """H K H with H = I - 11^T / n."""
    K = np.asarray(K, dtype=float)
    row = K.mean(axis=0)
    Kc = K - row[None, :] - K.mean(axis=1)[:, None] + K.mean()
    return symmetrize(Kc)


def _spectral_parts(K, kappa, tol):
    try:
        w, V = np.linalg.eigh(symmetrize(K))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    w = np.clip(w, 0.0, None)
    denom = w + kappa
    keep = denom > tol * max(denom.max(), 1.0)
    shrink = np.where(keep, w / np.where(keep, denom, 1.0), 0.0)
    inverse = np.where(keep, 1.0 / np.where(keep, denom, 1.0), 0.0)
    return V, shrink, inverse


def kcca(Kx, Ky, config: KccaConfig = KccaConfig()) -> KccaSolution:
    Kx = np.asarray(Kx, dtype=float)
    Ky = np.asarray(Ky, dtype=float)
    n = Kx.shape[0]
    if Kx.shape != (n, n) or Ky.shape != (n, n):
        raise InvalidData(f"kernel shapes differ: {Kx.shape} vs {Ky.shape}")
    d = config.n_components if config.n_components is not None else min(2, n)
    if d > n:
        raise InvalidData(f"n_components={d} exceeds n={n}")
    kx, ky = config.ridge_for(Kx), config.ridge_for(Ky)

    Vx, fx, ix = _spectral_parts(Kx, kx, config.eig_tol)
    Vy, fy, iy = _spectral_parts(Ky, ky, config.eig_tol)
    Px = (Vx * fx) @ Vx.T
    Py = (Vy * fy) @ Vy.T
    try:
        U, s, Wt = np.linalg.svd(Px @ Py)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    if s[0] <= 0 or s[d - 1] <= config.eig_tol * s[0]:
        raise RankDeficient(f"only {int((s > config.eig_tol * max(s[0], 1e-300)).sum())} "
                            f"stable components, asked for {d}")

    a, b = U[:, :d], Wt[:d].T
    alpha = (Vx * ix) @ (Vx.T @ a)
    beta = (Vy * iy) @ (Vy.T @ b)
    x_proj = Kx @ alpha
    y_proj = Ky @ beta
    # fix the per-component sign so the largest |x_proj| entry is positive
    pivot = np.abs(x_proj).argmax(axis=0)
    signs = np.sign(x_proj[pivot, np.arange(d)])
    signs[signs == 0] = 1.0
    return KccaSolution(alpha * signs, beta * signs, s[:d].copy(), x_proj * signs,
                        y_proj * signs, kx, ky)


def pca(X, target_dim: int):
    """Return (scores, components, variances) for the top ``target_dim`` directions."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidData("X must be 2-D")
    if target_dim < 1 or target_dim > X.shape[1]:
        raise InvalidData(f"target_dim must be in [1, {X.shape[1]}]")
    Xc = X - X.mean(axis=0)
    cov = symmetrize(Xc.T @ Xc / X.shape[0])
    w, V = np.linalg.eigh(cov)
    idx = np.argsort(w)[::-1][:target_dim]
    comps = V[:, idx]
    pivot = np.abs(comps).argmax(axis=0)
    comps = comps * np.sign(comps[pivot, np.arange(target_dim)])
    return Xc @ comps, comps, w[idx]


def pca_reduce(X, target_dim: int) -> np.ndarray:
    return pca(X, target_dim)[0]
