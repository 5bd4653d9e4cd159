"""Variance profiles and the classification of the origin singularity."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricBeyondTolerance,
    ConfigError,
    IOFailure,
    NegativeEntry,
    NonSquare,
    NoSupport,
    Reducible,
    UnsupportedK,
)

SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Symmetric nonnegative K x K matrix of block variances.

    ``S[i, j]`` is N times the variance of an entry in block (i, j).  Build
    instances through :func:`validate_profile`; the array is stored read-only.
    """

    S: np.ndarray

    @property
    def K(self) -> int:
        return self.S.shape[0]

    def permuted(self, perm) -> "VarianceProfile":
        p = list(perm)
        return validate_profile(self.S[np.ix_(p, p)])

    def __eq__(self, other):
        return isinstance(other, VarianceProfile) and np.array_equal(self.S, other.S)

    def __hash__(self):
        return hash(self.S.tobytes())

    def __repr__(self):
        return f"VarianceProfile(K={self.K}, S={self.S.tolist()})"

    def to_json(self) -> str:
        return json.dumps({"K": self.K, "S": self.S.tolist()})


def validate_profile(raw) -> VarianceProfile:
    S = np.array(raw, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise NonSquare(f"profile must be a non-empty square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ConfigError("profile entries must be finite")
    if np.any(S < 0):
        raise NegativeEntry("profile entries must be nonnegative")
    asym = np.abs(S - S.T).max()
    if asym > 0:
        if asym > SYMMETRY_RTOL * max(np.abs(S).max(), 1e-300):
            raise AsymmetricBeyondTolerance(f"profile asymmetry {asym:.3g} exceeds tolerance")
        S = 0.5 * (S + S.T)
    S.setflags(write=False)
    return VarianceProfile(S)


def load_profile(path) -> VarianceProfile:
    """Read a ``{"K": k, "S": [[...], ...]}`` JSON document."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot read profile {path}: {e.strerror or e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"profile {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or set(doc) != {"K", "S"}:
        raise ConfigError('profile document must have exactly the keys "K" and "S"')
    K, rows = doc["K"], doc["S"]
    if not isinstance(K, int) or K < 1:
        raise ConfigError("K must be a positive integer")
    if not isinstance(rows, list) or len(rows) != K:
        raise NonSquare(f"expected {K} rows, got {len(rows) if isinstance(rows, list) else rows!r}")
    for r in rows:
        if not isinstance(r, list) or len(r) != K:
            raise NonSquare(f"every row must have {K} entries")
    return validate_profile(rows)


@dataclass(frozen=True)
class SingularityClass:
    ell: int
    theta: float
    has_support: bool = True
    reducible: bool = False

    @property
    def sigma(self) -> float:
        return (self.ell - 1) / (self.ell + 1)

    @staticmethod
    def ell_from_sigma(sigma: float) -> int:
        return int(round((1 + sigma) / (1 - sigma)))


def has_support(p: VarianceProfile) -> bool:
    K = p.K
    return any(all(p.S[i, pi[i]] > 0 for i in range(K)) for pi in itertools.permutations(range(K)))


def is_irreducible(p: VarianceProfile) -> bool:
    # symmetric S is irreducible iff the graph of nonzero entries is connected
    K = p.K
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in range(K):
            if p.S[i, j] > 0 and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == K


def match_k2(S):
    """(s11, s12) after relabelling so that s22 = 0, or None."""
    for a, b in ((0, 1), (1, 0)):
        if S[b, b] == 0 and S[a, a] > 0 and S[a, b] > 0:
            return S[a, a], S[a, b]
    return None


def match_k3(S):
    """(s12, s22, s13) after relabelling into the staircase pattern s23 = s33 = 0, or None."""
    for i, j, k in itertools.permutations(range(3)):
        if (S[j, k] == 0 and S[k, k] == 0 and S[j, j] > 0
                and S[i, j] > 0 and S[i, k] > 0):
            return S[i, j], S[j, j], S[i, k]
    return None


def classify_singularity(p: VarianceProfile) -> SingularityClass:
    """Return the singularity degree and prefactor at the spectral origin.

    The two non-trivial shapes (K=2 with one vanishing diagonal entry, K=3 with
    the staircase zero pattern) have closed-form prefactors.  Everything else
    with support has a bounded, positive density at zero, and the prefactor is
    the Dyson density there.
    """
    K = p.K
    if K > 3:
        raise UnsupportedK("singularity classification is available for K <= 3 only")
    if not is_irreducible(p):
        raise Reducible("profile is reducible; classify its irreducible components separately")
    if not has_support(p):
        raise NoSupport("profile has no support: the limiting density has an atom at the origin")
    S = p.S
    if K == 1:
        # semicircle of radius 2*sqrt(s)
        return SingularityClass(1, 1.0 / (math.pi * math.sqrt(S[0, 0])))
    if K == 2 and (m := match_k2(S)):
        s11, s12 = m
        return SingularityClass(2, math.sqrt(3) / (4 * math.pi) * s11 ** (1 / 3) * s12 ** (-2 / 3))
    if K == 3 and (m := match_k3(S)):
        s12, s22, s13 = m
        return SingularityClass(
            3, math.sqrt(s12) / (3 * math.pi * s22 ** 0.25 * math.sqrt(2 * s13)))
    from .dyson import density_at_origin

    return SingularityClass(1, density_at_origin(p))


def spacing_scale(c: SingularityClass, p: VarianceProfile, N: int) -> float:
    """Typical eigenvalue gap at the origin, 2 (theta K N (ell+1))^(-(ell+1)/2)."""
    if N < 1:
        raise ConfigError("N must be a positive integer")
    return 2.0 * (c.theta * p.K * N * (c.ell + 1)) ** (-(c.ell + 1) / 2)
