import numpy as np
import pytest

from cokl.errors import DegenerateBandwidth, InvalidData
from cokl.kernels import (DataView, IndexPartition, KernelSpec, block, compute_kernel,
                          graph_laplacian, is_psd, median_bandwidth, psd_floor, standardize)


def test_rbf_identical_points_give_one():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
    K = compute_kernel(X, KernelSpec(bandwidth=0.7))
    assert K[0, 1] == 1.0
    assert np.all(np.diag(K) == 1.0)


def test_linear_orthogonal_is_zero():
    K = compute_kernel(np.array([[1.0, 0.0], [0.0, 1.0]]), KernelSpec(kind="linear"))
    assert K[0, 1] == 0.0


def test_rbf_at_two_sigma_squared():
    sigma = 1.3
    X = np.array([[0.0], [np.sqrt(2) * sigma]])
    K = compute_kernel(X, KernelSpec(bandwidth=sigma))
    assert K[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-12)


def test_kernel_is_bit_symmetric_and_psd(rng):
    X = rng.normal(size=(25, 4))
    for spec in (KernelSpec(), KernelSpec(kind="linear"), KernelSpec(kind="polynomial", degree=2)):
        K = compute_kernel(X, spec)
        assert np.array_equal(K, K.T)
        assert is_psd(K)


def test_linear_is_gram(rng):
    X = rng.normal(size=(6, 3))
    np.testing.assert_allclose(compute_kernel(X, KernelSpec(kind="linear")), X @ X.T, atol=1e-12)


def test_median_bandwidth_matches_pairwise(rng):
    X = rng.normal(size=(9, 2))
    d = [np.linalg.norm(X[i] - X[j]) for i in range(9) for j in range(i + 1, 9)]
    assert median_bandwidth(X) == pytest.approx(np.median(d), rel=1e-12)


def test_degenerate_bandwidth():
    with pytest.raises(DegenerateBandwidth):
        compute_kernel(np.ones((5, 2)))


def test_non_finite_input():
    with pytest.raises(InvalidData):
        compute_kernel(np.array([[0.0], [np.inf]]), KernelSpec(bandwidth=1.0))


def test_laplacian_examples(rng):
    L = graph_laplacian(np.array([[1, 0.5], [0.5, 1]]))
    np.testing.assert_array_equal(L, [[0.5, -0.5], [-0.5, 0.5]])
    assert np.all(graph_laplacian(np.eye(4)) == 0)
    A = rng.uniform(size=(5, 5))
    L = graph_laplacian(A + A.T)
    assert np.linalg.eigvalsh(L).min() >= -1e-10
    assert np.abs(L.sum(axis=1)).max() <= 1e-10 * 5 * 2


def test_block_bookkeeping():
    K = np.arange(16.0).reshape(4, 4)
    K = K + K.T
    c, m1 = np.array([0, 2]), np.array([1])
    np.testing.assert_array_equal(block(K, c, m1), [[K[0, 1]], [K[2, 1]]])
    np.testing.assert_array_equal(block(K, c, m1), block(K, m1, c).T)
    with pytest.raises(IndexError):
        block(K, [4], [0])


def test_block_cc_is_reordered_top_left(rng):
    X = rng.normal(size=(6, 2))
    K = compute_kernel(X)
    p = IndexPartition([1, 4, 5], [0, 2], [3])
    reordered = K[np.ix_(p.order, p.order)]
    np.testing.assert_array_equal(block(K, p.c, p.c), reordered[:3, :3])


def test_psd_floor_examples(rng):
    X = rng.normal(size=(5, 5))
    P = X @ X.T
    np.testing.assert_allclose(psd_floor(P), P, atol=1e-12)
    np.testing.assert_allclose(psd_floor(np.diag([1.0, -0.1])), np.diag([1.0, 0.0]), atol=1e-15)
    M = rng.normal(size=(6, 6))
    M = M + M.T
    F = psd_floor(M)
    w = np.linalg.eigvalsh(M)
    assert np.linalg.eigvalsh(F).min() >= -1e-12
    assert np.linalg.norm(F - M) <= np.abs(w[w < 0]).sum() + 1e-12


def test_partition_validation():
    with pytest.raises(InvalidData):
        IndexPartition([0, 1], [1], [2])
    with pytest.raises(InvalidData):
        IndexPartition([0], [1], [3])


def test_dataview_rejects_bad_rows():
    X = np.array([[1.0], [np.nan]])
    with pytest.raises(InvalidData):
        DataView(X, np.array([True, True]))
    with pytest.raises(InvalidData):
        DataView(X, np.array([False, False]))
    v = DataView(X, np.array([True, False]))
    assert not v.is_complete and v.available().shape == (1, 1)


def test_standardize_uses_present_rows():
    X = np.array([[1.0], [3.0], [100.0]])
    v = standardize(DataView(X, np.array([True, True, False])))
    np.testing.assert_allclose(v.values[:2, 0], [-1.0, 1.0])
