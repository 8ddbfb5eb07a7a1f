import numpy as np
import pytest

from cokl.errors import InvalidData
from cokl.imputation import naive_impute
from cokl.kernels import CONTINUOUS, DISCRETE, DataView


def test_complete_view_unchanged():
    X = np.arange(6.0).reshape(3, 2)
    out = naive_impute(DataView(X, np.ones(3, dtype=bool)))
    np.testing.assert_array_equal(out.values, X)


def test_mean_fill():
    v = DataView(np.array([[1.0], [3.0], [0.0]]), np.array([True, True, False]), (CONTINUOUS,))
    assert naive_impute(v).values[2, 0] == 2.0


def test_mode_fill_and_ties():
    v = DataView(np.array([[5.0], [5.0], [7.0], [0.0]]), np.array([1, 1, 1, 0], bool), (DISCRETE,))
    assert naive_impute(v).values[3, 0] == 5.0
    tie = DataView(np.array([[7.0], [2.0], [0.0]]), np.array([1, 1, 0], bool), (DISCRETE,))
    assert naive_impute(tie).values[2, 0] == 2.0


def test_present_rows_untouched():
    X = np.array([[1.5, 2.0], [2.5, 1.0], [9.0, 9.0]])
    v = DataView(X, np.array([True, True, False]), (CONTINUOUS, DISCRETE))
    out = naive_impute(v)
    np.testing.assert_array_equal(out.values[:2], X[:2])
    assert out.is_complete


def test_wrong_kind_count():
    with pytest.raises(InvalidData):
        DataView(np.zeros((2, 2)), np.ones(2, bool), (CONTINUOUS,))
