"""Naive per-column imputation used to seed the first kernel."""

import numpy as np

from .errors import InvalidData
from .kernels import CONTINUOUS, DataView


def column_mode(values) -> float:
    """Most frequent value; ties resolve to the smallest."""
    uniq, counts = np.unique(values, return_counts=True)
    return float(uniq[np.argmax(counts)])


def naive_impute(view: DataView) -> DataView:
    """Fill absent rows with the column mean (continuous) or mode (discrete)."""
    if view.is_complete:
        return view
    avail = view.available()
    if avail.shape[0] == 0:
        raise InvalidData("cannot impute a column with no present values")
    values = view.values.copy()
    missing = ~view.present
    for j, kind in enumerate(view.feature_kinds):
        col = avail[:, j]
        values[missing, j] = col.mean() if kind == CONTINUOUS else column_mode(col)
    return DataView(values, np.ones(view.n_total, dtype=bool), view.feature_kinds)
