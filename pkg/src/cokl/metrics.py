"""Normalized mutual information and average purity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidData


@dataclass(frozen=True)
class MetricRecord:
    nmi: float
    purity: float
    run_seed: int


def _labels(x) -> np.ndarray:
    labels = getattr(x, "labels", x)
    return np.asarray(labels).ravel()


def contingency(pred, truth) -> np.ndarray:
    pred, truth = _labels(pred), _labels(truth)
    if pred.shape != truth.shape:
        raise InvalidData(f"length mismatch: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise InvalidData("empty labelings")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1))
    np.add.at(table, (p, t), 1)
    return table


def _entropy(counts) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """I(pred; truth) / sqrt(H(pred) H(truth)), natural log.

    When either side is a single cluster the ratio is 0/0; it is 1 if both
    sides are single clusters (identical partitions) and 0 otherwise.
    """
    table = contingency(pred, truth)
    n = table.sum()
    hp = _entropy(table.sum(axis=1))
    ht = _entropy(table.sum(axis=0))
    if hp == 0 or ht == 0:
        return 1.0 if table.shape == (1, 1) else 0.0
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))[nz] / n**2
    mi = float((pij * np.log(pij / outer)).sum())
    return float(min(max(mi / np.sqrt(hp * ht), 0.0), 1.0))


def purity(pred, truth) -> float:
    """(1/n) * sum over predicted clusters of the majority true-class count."""
    table = contingency(pred, truth)
    return float(table.max(axis=1).sum() / table.sum())
