"""Hermitian eigenvalues: Householder tridiagonalization plus implicit QL.

The kernels are compiled with numba.  ``eigvalsh_batch`` runs one independent
solve per matrix in a parallel loop; every solve touches only its own slice, so
the results do not depend on the number of threads.
"""

import math
import os

import numpy as np
from numba import config, njit, prange

from .errors import NoConvergence

MAX_SWEEPS_PER_EIGENVALUE = 30

# skip probing the system TBB, which is too old on some hosts and only warns
if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER = "omp"


@njit(cache=True)
def _tridiagonalize(A, d, e):
    """Reduce Hermitian A (overwritten) to real tridiagonal form (d, e).

    Complex reflectors zero the column below the subdiagonal; the remaining
    complex subdiagonal entries are rotated to their moduli by a diagonal
    unitary similarity, which leaves the spectrum unchanged.
    """
    n = A.shape[0]
    v = np.empty(n, dtype=np.complex128)
    p = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        norm2 = 0.0
        for i in range(m):
            x = A[k + 1 + i, k]
            norm2 += x.real * x.real + x.imag * x.imag
        norm = math.sqrt(norm2)
        if norm == 0.0:
            continue
        x0 = A[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0 else 1.0 + 0j
        alpha = -phase * norm
        for i in range(m):
            v[i] = A[k + 1 + i, k]
        v[0] -= alpha
        vn2 = 0.0
        for i in range(m):
            vn2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        if vn2 == 0.0:
            continue
        inv = 1.0 / math.sqrt(vn2)
        for i in range(m):
            v[i] *= inv
        # p = A22 v, kappa = v^H p
        kappa = 0.0
        for i in range(m):
            s = 0j
            for j in range(m):
                s += A[k + 1 + i, k + 1 + j] * v[j]
            p[i] = s
        for i in range(m):
            kappa += (v[i].conjugate() * p[i]).real
        # w = 2 (p - kappa v); A22 -= v w^H + w v^H
        for i in range(m):
            p[i] = 2.0 * (p[i] - kappa * v[i])
        for i in range(m):
            for j in range(m):
                A[k + 1 + i, k + 1 + j] -= v[i] * p[j].conjugate() + p[i] * v[j].conjugate()
        A[k + 1, k] = alpha
        A[k, k + 1] = alpha.conjugate()
        for i in range(1, m):
            A[k + 1 + i, k] = 0j
            A[k, k + 1 + i] = 0j
    for i in range(n):
        d[i] = A[i, i].real
    for i in range(n - 1):
        e[i] = abs(A[i + 1, i])


@njit(cache=True)
def _tql(d, e):
    """Eigenvalues of the symmetric tridiagonal (d, e) in place; False on failure.

    ``e`` has length n with e[n-1] used as scratch.
    """
    n = d.shape[0]
    if n == 1:
        return True
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 1e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_SWEEPS_PER_EIGENVALUE:
                return False
            # Wilkinson shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return True


@njit(cache=True)
def _eigvalsh_into(A, out):
    n = A.shape[0]
    d = np.empty(n)
    e = np.zeros(n)
    _tridiagonalize(A, d, e)
    ok = _tql(d, e)
    d.sort()
    out[:] = d
    return ok


@njit(cache=True, parallel=True)
def _batch(mats, out, ok):
    for t in prange(mats.shape[0]):
        A = mats[t].copy()
        ok[t] = _eigvalsh_into(A, out[t])


def eigvalsh_batch(mats: np.ndarray):
    """Sorted eigenvalues of a stack of Hermitian matrices and per-matrix success flags."""
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    T, n, _ = mats.shape
    out = np.empty((T, n))
    ok = np.empty(T, dtype=np.bool_)
    _batch(mats, out, ok)
    return out, ok


def eigenvalues(H) -> np.ndarray:
    """All eigenvalues of one Hermitian matrix, ascending."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("need a square matrix")
    vals, ok = eigvalsh_batch(H[None])
    if not ok[0]:
        raise NoConvergence("implicit QL exceeded its iteration cap")
    return vals[0]
