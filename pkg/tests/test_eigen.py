import numpy as np
import pytest
import sympy

from rmblock.eigen import eigenvalues, eigvalsh_batch


def test_trivial_matrices():
    assert np.allclose(eigenvalues(np.diag([3.0, 1.0, 2.0])), [1, 2, 3], atol=1e-15)
    assert np.allclose(eigenvalues(np.array([[0, 1], [1, 0]])), [-1, 1], atol=1e-15)
    assert eigenvalues(np.array([[2.5]]))[0] == 2.5


def _random_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2


def test_characteristic_polynomial_oracle():
    # exact Gaussian-rational Hermitian matrix; its characteristic polynomial has rational coefficients
    rng = np.random.default_rng(5)
    re = rng.integers(-4, 5, size=(5, 5))
    im = rng.integers(-4, 5, size=(5, 5))
    M = sympy.Matrix(5, 5, lambda i, j: int(re[i, j]) + sympy.I * int(im[i, j]))
    H = (M + M.H) / 2
    x = sympy.symbols("x")
    roots = sorted(float(sympy.re(r)) for r in H.charpoly(x).nroots(n=30))
    Hn = np.array(H.evalf(), dtype=complex)
    assert np.allclose(eigenvalues(Hn), roots, atol=1e-8)


def test_residuals_and_trace_invariants():
    rng = np.random.default_rng(11)
    for n in (3, 17, 60):
        H = _random_hermitian(rng, n)
        lam = eigenvalues(H)
        norm = np.linalg.norm(H, 2)
        assert np.all(np.diff(lam) >= 0)
        assert abs(lam.sum() - np.trace(H).real) <= 1e-8 * n * norm
        assert abs((lam ** 2).sum() - np.trace(H @ H).real) <= 1e-8 * n * norm ** 2
        # spot-check eigenpairs via inverse iteration on the computed eigenvalue
        for k in (0, n // 2, n - 1):
            v = np.linalg.solve(H - (lam[k] + 1e-14 * norm) * np.eye(n), np.ones(n))
            v /= np.linalg.norm(v)
            assert np.linalg.norm(H @ v - lam[k] * v) / norm <= 1e-10


def test_batch_matches_single():
    rng = np.random.default_rng(3)
    mats = np.stack([_random_hermitian(rng, 9) for _ in range(6)])
    vals, ok = eigvalsh_batch(mats)
    assert ok.all()
    for H, v in zip(mats, vals):
        assert np.array_equal(v, eigenvalues(H))


def test_degenerate_spectrum():
    Q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(6, 6)) + 0j)
    H = Q @ np.diag([1.0, 1.0, 1.0, -2.0, -2.0, 0.0]) @ Q.conj().T
    assert np.allclose(eigenvalues(H), [-2, -2, 0, 1, 1, 1], atol=1e-12)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        eigenvalues(np.zeros((2, 3)))
