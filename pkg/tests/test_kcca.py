import numpy as np
import pytest
from scipy import linalg

from cokl.errors import InvalidData, RankDeficient
from cokl.kcca import KccaConfig, center_kernel, kcca, pca
from cokl.kernels import KernelSpec, compute_kernel


def dense_correlations(Kx, Ky, kx, ky):
    """Positive generalized eigenvalues of the full 2n x 2n regularized problem."""
    n = Kx.shape[0]
    Z = np.zeros((n, n))
    A = np.block([[Z, Kx @ Ky], [Ky @ Kx, Z]])
    Rx, Ry = Kx + kx * np.eye(n), Ky + ky * np.eye(n)
    B = np.block([[Rx @ Rx, Z], [Z, Ry @ Ry]])
    return linalg.eigh((A + A.T) / 2, B, eigvals_only=True)[::-1]


def _pair(rng, n=10):
    Kx = center_kernel(compute_kernel(rng.normal(size=(n, 3))))
    Ky = center_kernel(compute_kernel(rng.normal(size=(n, 2))))
    return Kx, Ky


@pytest.mark.parametrize("seed", range(5))
def test_matches_dense_generalized_eigensolve(seed):
    rng = np.random.default_rng(seed)
    Kx, Ky = _pair(rng)
    cfg = KccaConfig(n_components=4, kappa_scale=0.1)
    sol = kcca(Kx, Ky, cfg)
    ref = dense_correlations(Kx, Ky, sol.kappa_x, sol.kappa_y)
    np.testing.assert_allclose(sol.correlations, ref[:4], atol=1e-8)


def test_normalization_and_residuals(rng):
    Kx, Ky = _pair(rng, 12)
    sol = kcca(Kx, Ky, KccaConfig(n_components=3))
    n = Kx.shape[0]
    Rx, Ry = Kx + sol.kappa_x * np.eye(n), Ky + sol.kappa_y * np.eye(n)
    scale = np.linalg.norm(Kx @ Ky)
    for i, lam in enumerate(sol.correlations):
        a, b = sol.alpha[:, i], sol.beta[:, i]
        assert abs(a @ Rx @ Rx @ a - 1) <= 1e-6
        assert abs(b @ Ry @ Ry @ b - 1) <= 1e-6
        assert np.linalg.norm(Kx @ Ky @ b - lam * Rx @ Rx @ a) <= 1e-6 * scale
        assert np.linalg.norm(Ky @ Kx @ a - lam * Ry @ Ry @ b) <= 1e-6 * scale
    assert np.all(np.diff(sol.correlations) <= 0)
    assert np.all((sol.correlations >= -1) & (sol.correlations <= 1 + 1e-6))
    np.testing.assert_allclose(sol.x_projected, Kx @ sol.alpha)


def test_identical_kernels(rng):
    K = center_kernel(compute_kernel(rng.normal(size=(20, 3))))
    sol = kcca(K, K, KccaConfig(kappa_scale=1e-3))
    assert sol.correlations[0] >= 0.99


def test_rotated_linear_views(rng):
    X = rng.normal(size=(30, 3))
    R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    Y = X @ R
    lin = KernelSpec(kind="linear")
    Kx = center_kernel(compute_kernel(X, lin))
    Ky = center_kernel(compute_kernel(Y, lin))
    sol = kcca(Kx, Ky, KccaConfig(n_components=2, kappa_scale=1e-4))
    assert np.all(sol.correlations >= 0.99)
    # classical CCA on the raw features gives correlation 1 for an invertible map
    Xc, Yc = X - X.mean(0), Y - Y.mean(0)
    Wx = linalg.inv(linalg.sqrtm(Xc.T @ Xc))
    Wy = linalg.inv(linalg.sqrtm(Yc.T @ Yc))
    rho = linalg.svdvals(Wx @ Xc.T @ Yc @ Wy)
    np.testing.assert_allclose(rho[:2], 1.0, atol=1e-10)


def test_kappa_shrinks_top_correlation(rng):
    Kx, Ky = _pair(rng, 15)
    vals = [kcca(Kx, Ky, KccaConfig(kappa=k)).correlations[0] for k in (1e-3, 1e-2, 0.1, 1.0, 10.0)]
    assert np.all(np.diff(vals) <= 1e-10)


def test_permutation_invariance(rng):
    Kx, Ky = _pair(rng, 14)
    perm = rng.permutation(14)
    a = kcca(Kx, Ky)
    b = kcca(Kx[np.ix_(perm, perm)], Ky[np.ix_(perm, perm)])
    np.testing.assert_allclose(b.correlations, a.correlations, atol=1e-10)
    for i in range(2):
        x, y = a.x_projected[perm, i], b.x_projected[:, i]
        s = np.sign(x @ y)
        np.testing.assert_allclose(s * y, x, atol=1e-8 * np.abs(x).max())


def test_rank_deficient():
    K = np.ones((6, 6))
    with pytest.raises(RankDeficient):
        kcca(center_kernel(K), center_kernel(K), KccaConfig(n_components=2))


def test_too_many_components(rng):
    Kx, Ky = _pair(rng, 5)
    with pytest.raises(InvalidData):
        kcca(Kx, Ky, KccaConfig(n_components=6))


def test_center_kernel_examples(rng):
    np.testing.assert_allclose(center_kernel(3.0 * np.ones((4, 4))), 0.0, atol=1e-15)
    A = rng.normal(size=(6, 6))
    K = A @ A.T
    Kc = center_kernel(K)
    assert np.abs(Kc.sum(axis=1)).max() <= 1e-10 * 6 * np.abs(K).max()
    np.testing.assert_allclose(center_kernel(Kc), Kc, atol=1e-12)


def test_pca_examples(rng):
    X = rng.normal(size=(8, 3))
    scores, comps, var = pca(X, 3)
    Xc = X - X.mean(0)
    np.testing.assert_allclose(np.linalg.norm(scores), np.linalg.norm(Xc), rtol=1e-12)
    np.testing.assert_allclose(comps.T @ comps, np.eye(3), atol=1e-12)

    scores, comps, var = pca(X, 2)
    w = np.linalg.eigvalsh(np.cov(X.T, bias=True))[::-1]
    np.testing.assert_allclose(var, w[:2], rtol=1e-10)
    recon = np.linalg.norm(Xc - scores @ comps.T) ** 2 / 8
    assert recon == pytest.approx(w[2], rel=1e-8)

    r1 = np.outer(rng.normal(size=10), [1.0, -2.0, 0.5])
    s, c, _ = pca(r1, 1)
    np.testing.assert_allclose(s @ c.T, r1 - r1.mean(0), atol=1e-12)
    with pytest.raises(InvalidData):
        pca(X, 4)
