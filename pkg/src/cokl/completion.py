"""Collective kernel learning: complete each view's kernel against another view's Laplacian.

Each half-step solves ``min tr(L K)`` over PSD ``K`` whose entries between
present instances are fixed. Writing ``K = A A^T`` with the rows of ``A`` for
present instances (S) held fixed, the stationary point for the absent rows (U) is

    A_U = -(L_UU)^{-1} L_US A_S

which gives ``K_US = -G K_SS`` and ``K_UU = G K_SS G^T`` with
``G = (L_UU)^{-1} L_US``. With S = c + m2 and U = m1 this expands to the
per-block formulas for the two-view case.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import CoverageError, InvalidData, SingularBlock
from .imputation import naive_impute
from .kernels import (
    DataView,
    IndexPartition,
    KernelSpec,
    compute_kernel,
    graph_laplacian,
    resolve_bandwidth,
    symmetrize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoklConfig:
    max_iters: int = 50
    rel_tol: float = 1e-4
    # relative to trace(L)/n
    laplacian_jitter: float = 1e-8

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidData("max_iters must be a positive integer")
        if not self.rel_tol > 0:
            raise InvalidData("rel_tol must be positive")
        if self.laplacian_jitter < 0:
            raise InvalidData("laplacian_jitter must be nonnegative")


@dataclass
class CoklResult:
    kernels: list
    iterations: int
    converged: bool
    # one tuple per iteration: tr(L_prev K_j) after each half-step, in update order
    objective_trace: list = field(default_factory=list)
    # same quantity evaluated just before each half-step
    pre_step_objectives: list = field(default_factory=list)
    known_masks: list = field(default_factory=list)
    bandwidths: list = field(default_factory=list)
    changes: list = field(default_factory=list)


def trace_objective(L, K) -> float:
    """tr(L K) as an elementwise sum, without forming the product."""
    L = np.asarray(L, dtype=float)
    K = np.asarray(K, dtype=float)
    if L.shape != K.shape or L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InvalidData(f"shape mismatch: {L.shape} vs {K.shape}")
    return float(np.einsum("ij,ji->", L, K))


def _as_mask(known, n) -> np.ndarray:
    known = np.asarray(known)
    if known.dtype == bool:
        if known.shape != (n,):
            raise InvalidData("known mask has wrong length")
        return known
    mask = np.zeros(n, dtype=bool)
    mask[known.astype(np.intp)] = True
    return mask


def _solve_block(M, B) -> np.ndarray:
    try:
        return linalg.cho_solve(linalg.cho_factor(M), B)
    except linalg.LinAlgError:
        pass
    try:
        G = linalg.solve(M, B, assume_a="sym")
    except linalg.LinAlgError as exc:
        raise SingularBlock(f"Laplacian sub-block is singular: {exc}") from exc
    if not np.all(np.isfinite(G)):
        raise SingularBlock("Laplacian sub-block solve produced non-finite values")
    return G


def complete_kernel(L_fixed, K, known, jitter: float = 1e-8) -> np.ndarray:
    """Fill the rows/columns of ``K`` outside ``known`` by minimizing tr(L_fixed K).

    ``known`` is a boolean mask or an index array of instances whose kernel
    entries are trusted; every other entry of ``K`` is ignored. Known entries
    are copied through untouched.
    """
    L = np.asarray(L_fixed, dtype=float)
    K = np.asarray(K, dtype=float)
    n = L.shape[0]
    if L.shape != (n, n) or K.shape != (n, n):
        raise InvalidData(f"size mismatch: L {L.shape}, K {K.shape}")
    mask = _as_mask(known, n)
    S = np.flatnonzero(mask)
    U = np.flatnonzero(~mask)
    out = np.empty((n, n))
    K_ss = K[np.ix_(S, S)]
    out[np.ix_(S, S)] = K_ss
    if U.size == 0:
        return out
    if S.size == 0:
        raise InvalidData("nothing is known about this kernel")

    scale = np.trace(L) / n
    M = L[np.ix_(U, U)] + (jitter * (scale if scale > 0 else 1.0)) * np.eye(U.size)
    G = _solve_block(M, L[np.ix_(U, S)])
    K_us = -G @ K_ss
    out[np.ix_(U, S)] = K_us
    out[np.ix_(S, U)] = K_us.T
    out[np.ix_(U, U)] = symmetrize(G @ K_ss @ G.T)
    return out


def complete_half_step(L_fixed, K_known, partition: IndexPartition, target: str = "y",
                       jitter: float = 1e-8) -> np.ndarray:
    """Two-view form: complete K_y (unknown rows m1) or K_x (unknown rows m2).

    ``K_known`` is indexed in the original instance order; only the blocks
    available to the target view are read.
    """
    if target not in ("x", "y"):
        raise InvalidData("target must be 'x' or 'y'")
    n = partition.n_total
    if np.shape(K_known) != (n, n):
        raise InvalidData("kernel size does not match partition")
    mask = np.zeros(n, dtype=bool)
    mask[partition.c] = True
    mask[partition.m2 if target == "y" else partition.m1] = True
    return complete_kernel(L_fixed, K_known, mask, jitter)


def _initial_kernels(views, spec):
    known, inits, sigmas = [], [], []
    for view in views:
        avail = view.available()
        sigma = resolve_bandwidth(avail, spec)
        K_known = compute_kernel(avail, spec, sigma)
        K = compute_kernel(naive_impute(view).values, spec, sigma)
        idx = np.flatnonzero(view.present)
        # exact constraint entries, independent of how the imputed kernel was evaluated
        K[np.ix_(idx, idx)] = K_known
        known.append(view.present.copy())
        inits.append(K)
        sigmas.append(sigma)
    return known, inits, sigmas


def _rel_change(new, old) -> float:
    denom = np.linalg.norm(old)
    diff = np.linalg.norm(new - old)
    return float(diff / denom) if denom > 0 else float(diff)


def cokl_multi(views: Sequence[DataView], spec: KernelSpec = KernelSpec(),
               config: CoklConfig = CoklConfig(), callback=None) -> CoklResult:
    """Cyclic completion K_1 -> K_2 -> ... -> K_k -> K_1 until the kernels stop moving.

    The first view's kernel is seeded from naively imputed features; each
    subsequent view is completed against the Laplacian of the view before it,
    recomputed from that view's latest kernel. ``callback(iteration, j, K)``,
    if given, sees every freshly completed kernel.
    """
    views = list(views)
    if len(views) < 2:
        raise InvalidData("need at least two views")
    n = views[0].n_total
    if any(v.n_total != n for v in views):
        raise InvalidData("views are not row-aligned")
    covered = np.vstack([v.present for v in views]).any(axis=0)
    if not covered.all():
        raise CoverageError(f"{int((~covered).sum())} instances are missing from every view")

    known, kernels, sigmas = _initial_kernels(views, spec)
    k = len(views)
    order = list(range(1, k)) + [0]
    result = CoklResult(kernels=kernels, iterations=0, converged=False,
                        known_masks=known, bandwidths=sigmas)

    for it in range(1, config.max_iters + 1):
        before = [K for K in kernels]
        pre, post = [], []
        for j in order:
            L = graph_laplacian(kernels[(j - 1) % k])
            pre.append(trace_objective(L, kernels[j]))
            kernels[j] = complete_kernel(L, kernels[j], known[j], config.laplacian_jitter)
            if callback is not None:
                callback(it, j, kernels[j])
            post.append(trace_objective(L, kernels[j]))
        change = max(_rel_change(new, old) for new, old in zip(kernels, before))
        result.pre_step_objectives.append(tuple(pre))
        result.objective_trace.append(tuple(post))
        result.changes.append(change)
        result.iterations = it
        logger.debug("cokl iteration %d: relative change %.3e", it, change)
        if change < config.rel_tol:
            result.converged = True
            break
    result.kernels = kernels
    return result


def cokl_two(view_x: DataView, view_y: DataView, spec: KernelSpec = KernelSpec(),
             config: CoklConfig = CoklConfig(), callback=None) -> CoklResult:
    """Alternate K_y <- argmin tr(L_x K_y), then K_x <- argmin tr(L_y K_x)."""
    IndexPartition.from_views(view_x, view_y)
    return cokl_multi([view_x, view_y], spec, config, callback)
