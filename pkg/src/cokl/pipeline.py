"""End-to-end clustering methods: CoKL+KCCA and the comparison baselines."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .clustering import combine_kernels, kmeans, spectral_embedding
from .completion import CoklConfig, CoklResult, cokl_multi
from .errors import InvalidData
from .imputation import naive_impute
from .kcca import KccaConfig, center_kernel, kcca, pca_reduce
from .kernels import DataView, KernelSpec, compute_kernel, psd_floor, standardize
from .metrics import MetricRecord, nmi, purity

METHODS = ("cokl_kcca", "concat", "cokl_ka_sc", "cokl_kp_sc", "comp_concat", "comp_kcca")
COMPLETE_DATA_METHODS = ("comp_concat", "comp_kcca")
COKL_METHODS = ("cokl_kcca", "cokl_ka_sc", "cokl_kp_sc")


@dataclass(frozen=True)
class MethodSpec:
    name: str
    k: int
    kernel: KernelSpec = KernelSpec()
    cokl: CoklConfig = CoklConfig()
    kcca: KccaConfig = KccaConfig()
    restarts: int = 30
    rng_seed: int = 0
    standardize: bool = True
    # "concat" stacks [x_proj | y_proj]; "average" uses their mean
    projection_space: str = "concat"
    # PCA is applied to each projected view only above this dimension
    pca_cap: int = 10

    def __post_init__(self):
        if self.name not in METHODS:
            raise InvalidData(f"unknown method {self.name!r}; expected one of {METHODS}")
        if self.k < 2:
            raise InvalidData("k must be at least 2")
        if self.restarts < 1:
            raise InvalidData("restarts must be positive")
        if self.projection_space not in ("concat", "average"):
            raise InvalidData("projection_space must be 'concat' or 'average'")
        if self.pca_cap < 1:
            raise InvalidData("pca_cap must be positive")


@dataclass
class MethodRun:
    record: MetricRecord
    labels: np.ndarray
    projection: np.ndarray
    iterations: int | None = None
    correlations: list = field(default_factory=list)


def _prepare(views, method):
    return [standardize(v) for v in views] if method.standardize else list(views)


def _complete_kernels(views, method, cache):
    key = ("cokl", method.kernel, method.cokl, method.standardize)
    if cache is not None and key in cache:
        return cache[key]
    result = cokl_multi(views, method.kernel, method.cokl)
    if cache is not None:
        cache[key] = result
    return result


def kcca_embedding(Kx, Ky, method: MethodSpec):
    """Clustering coordinates from a pair of full kernels; shared by cokl_kcca and comp_kcca."""
    Kx = center_kernel(psd_floor(Kx))
    Ky = center_kernel(psd_floor(Ky))
    d = method.kcca.n_components if method.kcca.n_components is not None else method.k
    sol = kcca(Kx, Ky, replace(method.kcca, n_components=d))
    xp, yp = sol.x_projected, sol.y_projected
    if d > method.pca_cap:
        xp, yp = pca_reduce(xp, method.pca_cap), pca_reduce(yp, method.pca_cap)
    Z = np.hstack([xp, yp]) if method.projection_space == "concat" else 0.5 * (xp + yp)
    return Z, sol


def _projection_2d(Z) -> np.ndarray:
    if Z.shape[1] >= 2:
        return pca_reduce(Z, 2)
    return np.hstack([Z - Z.mean(axis=0), np.zeros_like(Z)])


def run_method(method: MethodSpec, views: Sequence[DataView], truth, cache: dict | None = None) -> MethodRun:
    """Run one method on row-aligned views and score it against ``truth``.

    ``cache`` (any dict) lets several CoKL-based methods on the same views
    share one completion.
    """
    views = list(views)
    truth = np.asarray(truth)
    if len(views) < 2:
        raise InvalidData("need at least two views")
    if any(v.n_total != truth.size for v in views):
        raise InvalidData("views and truth are not row-aligned")
    if method.name in COMPLETE_DATA_METHODS and not all(v.is_complete for v in views):
        raise InvalidData(f"{method.name} requires complete views")
    if method.name in ("cokl_kcca", "comp_kcca") and len(views) != 2:
        raise InvalidData(f"{method.name} pairs exactly two views, got {len(views)}")

    views = _prepare(views, method)
    iterations = None
    correlations = []
    if method.name in ("concat", "comp_concat"):
        Z = np.hstack([naive_impute(v).values for v in views])
        assignment = kmeans(Z, method.k, method.restarts, method.rng_seed)
    elif method.name == "comp_kcca":
        Kx, Ky = (compute_kernel(v.values, method.kernel) for v in views)
        Z, sol = kcca_embedding(Kx, Ky, method)
        correlations = sol.correlations.tolist()
        assignment = kmeans(Z, method.k, method.restarts, method.rng_seed)
    else:
        res: CoklResult = _complete_kernels(views, method, cache)
        iterations = res.iterations
        if method.name == "cokl_kcca":
            Z, sol = kcca_embedding(res.kernels[0], res.kernels[1], method)
            correlations = sol.correlations.tolist()
            assignment = kmeans(Z, method.k, method.restarts, method.rng_seed)
        else:
            mode = "add" if method.name == "cokl_ka_sc" else "product"
            K = combine_kernels([psd_floor(K) for K in res.kernels], mode)
            Z = spectral_embedding(K, method.k)
            # same as spectral_cluster(K, ...), reusing the embedding for the projection output
            assignment = kmeans(Z, method.k, method.restarts, method.rng_seed)

    record = MetricRecord(nmi(assignment, truth), purity(assignment, truth), method.rng_seed)
    return MethodRun(record, assignment.labels, _projection_2d(Z), iterations, correlations)
