"""Monte Carlo sampling of the block ensemble.

Each trial owns a Philox stream keyed by ``(seed << 64) | trial``, so trial t
produces the same matrix no matter how trials are batched or how many threads
diagonalize them.  A trial whose eigensolve fails is redrawn from the same key
with the counter moved to a fresh block (``attempt``), at most 1% of trials.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .eigen import eigvalsh_batch
from .errors import ConfigError, DomainError, NoConvergence
from .model import VarianceProfile, classify_singularity, spacing_scale

log = logging.getLogger(__name__)

MAX_DISCARD_FRACTION = 0.01
_BATCH_BYTES = 64 * 2**20
_MASK64 = (1 << 64) - 1


def trial_generator(seed: int, trial: int, attempt: int = 0) -> np.random.Generator:
    if not 0 <= seed <= _MASK64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    bitgen = np.random.Philox(key=(seed << 64) | (trial & _MASK64),
                              counter=[0, 0, 0, attempt])
    return np.random.Generator(bitgen)


def box_muller(gen: np.random.Generator, n: int) -> np.ndarray:
    """``n`` standard normals from ceil(n/2) pairs of uniforms."""
    m = (n + 1) // 2
    u = gen.random(2 * m)
    r = np.sqrt(-2.0 * np.log1p(-u[:m]))  # 1 - u lies in (0, 1]
    phi = 2.0 * np.pi * u[m:]
    return np.concatenate([r * np.cos(phi), r * np.sin(phi)])[:n]


def _ginibre(g: np.ndarray, N: int) -> np.ndarray:
    # real and imaginary parts with variance 1/(2N) each
    return (g[: N * N] + 1j * g[N * N:]).reshape(N, N) / math.sqrt(2 * N)


def sample_block_matrix(p: VarianceProfile, N: int, seed: int, trial: int = 0,
                        attempt: int = 0) -> np.ndarray:
    """One draw of H = sum_ij sqrt(s_ij/2) (E_ij (x) X_ij + E_ji (x) X_ij^*).

    The Ginibre matrices for the ordered pairs (i, j) and (j, i) are independent,
    so for i < j their two contributions to block (i, j) add up to a single
    Ginibre matrix of variance s_ij / N.  One matrix is therefore drawn per
    unordered pair i <= j, in row-major order.
    """
    if N < 1:
        raise ConfigError("N must be positive")
    K = p.K
    gen = trial_generator(seed, trial, attempt)
    H = np.zeros((K * N, K * N), dtype=complex)
    for i in range(K):
        for j in range(i, K):
            X = _ginibre(box_muller(gen, 2 * N * N), N)
            s = p.S[i, j]
            if s == 0:
                continue
            if i == j:
                H[i * N:(i + 1) * N, i * N:(i + 1) * N] = math.sqrt(s / 2) * (X + X.conj().T)
            else:
                B = math.sqrt(s) * X
                H[i * N:(i + 1) * N, j * N:(j + 1) * N] = B
                H[j * N:(j + 1) * N, i * N:(i + 1) * N] = B.conj().T
    return H


def set_threads(threads: int | None) -> None:
    if threads is not None:
        if threads < 1:
            raise ConfigError("threads must be positive")
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def sample_eigenvalues(p: VarianceProfile, N: int, trials: int, seed: int,
                       threads: int | None = None) -> np.ndarray:
    """Eigenvalues of ``trials`` independent draws, shape (trials, K N)."""
    if trials < 1:
        raise ConfigError("trials must be positive")
    set_threads(threads)
    n = p.K * N
    batch = max(1, min(trials, _BATCH_BYTES // (16 * n * n)))
    out = np.empty((trials, n))
    discarded = 0
    for start in range(0, trials, batch):
        idx = range(start, min(start + batch, trials))
        mats = np.stack([sample_block_matrix(p, N, seed, t) for t in idx])
        vals, ok = eigvalsh_batch(mats)
        for k in np.flatnonzero(~ok):
            t, attempt = idx[k], 0
            while not ok[k]:
                attempt += 1
                discarded += 1
                log.warning("trial %d: eigensolver did not converge, redrawing (attempt %d)", t, attempt)
                if discarded > MAX_DISCARD_FRACTION * trials:
                    raise NoConvergence(f"more than {MAX_DISCARD_FRACTION:.0%} of trials discarded")
                v, good = eigvalsh_batch(sample_block_matrix(p, N, seed, t, attempt)[None])
                vals[k], ok[k] = v[0], good[0]
        out[start:start + len(idx)] = vals
    return out


@dataclass(frozen=True)
class MCEstimate:
    mean: complex
    stderr: float
    trials: int


def resolvent_samples(eigs: np.ndarray, z: complex) -> np.ndarray:
    """Per-trial normalized traces (1/(KN)) sum_lambda 1/(lambda - z)."""
    return (1.0 / (eigs - z)).mean(axis=1)


def estimate(values: np.ndarray) -> MCEstimate:
    T = len(values)
    se = max(values.real.std(ddof=1), values.imag.std(ddof=1)) / math.sqrt(T)
    return MCEstimate(complex(values.mean()), float(se), T)


def mc_resolvent_trace(p: VarianceProfile, N: int, z: complex, trials: int, seed: int,
                       threads: int | None = None) -> MCEstimate:
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("need Im z > 0")
    if trials < 2:
        raise ConfigError("need at least two trials")
    return estimate(resolvent_samples(sample_eigenvalues(p, N, trials, seed, threads), z))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    trials: int
    normalization: str  # "macroscopic" or "microscopic"
    eta: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def density(self) -> np.ndarray:
        d = self.counts / (self.trials * self.widths)
        if self.normalization == "macroscopic":
            d = d / self.meta["KN"]
        return d

    @property
    def empty_bins(self) -> bool:
        return bool(np.any(self.counts == 0))


def _check_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=float)
    if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
        raise ConfigError("histogram edges must be strictly increasing")
    return e


def _counts(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.histogram(values.ravel(), bins=edges)[0].astype(np.int64)


def histogram_from_eigs(eigs, edges, p: VarianceProfile, N: int, eta: float | None = None) -> Histogram:
    edges = _check_edges(edges)
    trials = eigs.shape[0]
    meta = {"K": p.K, "N": N, "KN": p.K * N}
    if eta is None:
        return Histogram(edges, _counts(eigs, edges), trials, "macroscopic", None, meta)
    return Histogram(edges, _counts(eigs / eta, edges), trials, "microscopic", eta, meta)


def macroscopic_histogram(p: VarianceProfile, N: int, trials: int, edges, seed: int,
                          threads: int | None = None) -> Histogram:
    edges = _check_edges(edges)
    eigs = sample_eigenvalues(p, N, trials, seed, threads)
    h = histogram_from_eigs(eigs, edges, p, N)
    if h.empty_bins:
        log.warning("macroscopic histogram has empty bins")
    if N >= 50:
        lam = 2 * math.sqrt(p.S.sum(axis=1).max()) + 1
        if np.abs(eigs).max() > lam:
            log.warning("eigenvalues found outside the norm bound %.3g", lam)
    return h


def microscopic_histogram(p: VarianceProfile, N: int, trials: int, xi_edges, seed: int,
                          threads: int | None = None) -> Histogram:
    """Histogram of lambda / eta_N, normalized to estimate K N eta_N rho_N(eta_N xi)."""
    xi_edges = _check_edges(xi_edges)
    eta = spacing_scale(classify_singularity(p), p, N)
    eigs = sample_eigenvalues(p, N, trials, seed, threads)
    h = histogram_from_eigs(eigs, xi_edges, p, N, eta)
    if h.empty_bins:
        log.warning("microscopic histogram has empty bins")
    return h
