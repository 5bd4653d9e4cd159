"""Closed-form microscopic limits at the spectral origin.

``limit_resolvent(kind, zeta)`` is the N -> oo limit of
tau_N E Tr (H - tau_N zeta)^-1 for the kind's natural scale tau_N (see
:func:`resolvent_scale`).  ``limit_density`` turns it into the one-point function
in spacing units, xi -> lim K N eta_N rho_N(eta_N xi).  The two scales differ by
the constant ``eta_N / tau_N`` returned from :func:`conversion_factor`, so

    limit_density(kind, xi) = (c / pi) Im limit_resolvent(kind, c xi + i0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import specfun
from .errors import ConfigError, DomainError, SeriesNotConverged, SingularAtZero
from .model import VarianceProfile, classify_singularity, match_k2, match_k3
from .specfun import EULER_GAMMA, bessel_ki, bessel_j, hyper_0f2, meijer_g_303

HALF = Fraction(1, 2)

# (Meijer G parameters, 0F2 parameters, weight) for the three K=2 terms
K2_TERMS = (
    ((0, HALF, HALF), (HALF, 1), 0.5),
    ((HALF, 1, Fraction(3, 2)), (Fraction(3, 2), 2), 1.0),
    ((HALF, HALF, 1), (1, Fraction(3, 2)), 1.0),
)

# Nonzero coefficients c_{n,r} of v^n w^r in the expansion of
#   (1 + v^2)/(v^2 w) [s v^2 + m (1 + v^2)/v - 1 + s w^2 + m (1 + w^2)/w + 2 s v w]
# with s = sigma11 and m = -i zeta, stored as (constant, coefficient of m, coefficient of s).
WEAK_K2_COEFFS = {
    (-3, -1): (0, 1, 0),
    (-2, -2): (0, 1, 0),
    (-2, -1): (-1, 0, 0),
    (-2, 0): (0, 1, 0),
    (-2, 1): (0, 0, 1),
    (-1, -1): (0, 2, 0),
    (-1, 0): (0, 0, 2),
    (0, -2): (0, 1, 0),
    (0, -1): (-1, 0, 1),
    (0, 0): (0, 1, 0),
    (0, 1): (0, 0, 1),
    (1, -1): (0, 1, 0),
    (1, 0): (0, 0, 2),
    (2, -1): (0, 0, 1),
}


@dataclass(frozen=True)
class LimitKind:
    name: str  # k1, k2, k3, weak-k2, weak-k3, chiral
    sigma: float = 0.0

    def __post_init__(self):
        if self.name not in KINDS:
            raise ConfigError(f"unknown limit kind {self.name!r}; choose from {sorted(KINDS)}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError("sigma must be finite and nonnegative")
        if self.name in ("k1", "k2", "k3", "chiral") and self.sigma != 0:
            raise ConfigError(f"kind {self.name} takes no sigma parameter")

    @property
    def K(self) -> int:
        return KINDS[self.name]

    def __str__(self):
        return f"{self.name}(sigma={self.sigma:g})" if self.name.startswith("weak") else self.name


KINDS = {"k1": 1, "k2": 2, "k3": 3, "weak-k2": 2, "weak-k3": 3, "chiral": 2}

K1 = LimitKind("k1")
K2 = LimitKind("k2")
K3 = LimitKind("k3")
CHIRAL = LimitKind("chiral")


def WeakK2(sigma11: float) -> LimitKind:
    return LimitKind("weak-k2", float(sigma11))


def WeakK3(sigma12: float) -> LimitKind:
    return LimitKind("weak-k3", float(sigma12))


def weak_k2_coefficients(sigma11: float, zeta: complex) -> dict:
    m = -1j * complex(zeta)
    return {nr: c0 + cm * m + cs * sigma11 for nr, (c0, cm, cs) in WEAK_K2_COEFFS.items()}


# ---------------------------------------------------------------- resolvent limits


def _k2(zeta: complex) -> complex:
    x = -zeta * zeta / 8
    side = 0
    if x.imag == 0 and x.real < 0:
        # real zeta: boundary value approached from Im zeta > 0
        side = -1 if zeta.real > 0 else 1
    total = sum(w * meijer_g_303(b, x, side) * hyper_0f2(*f, x) for b, f, w in K2_TERMS)
    return 1j * math.sqrt(2 / math.pi) * total


def _bessel_pair_sum(x):
    return bessel_ki(0, 0, x) + bessel_ki(1, 1, x)


def _k3(zeta: complex) -> complex:
    return 2j * _bessel_pair_sum(2 * cmath.sqrt(-1j * zeta))


def _chiral(zeta: complex) -> complex:
    return 4 * zeta * _bessel_pair_sum(-2j * zeta)


def _weak_k3(sigma: float, zeta: complex) -> complex:
    w = -1j * zeta * (sigma - 1j * zeta)
    x = 2 * cmath.sqrt(w)
    first = (sigma - 2j * zeta) * _bessel_pair_sum(x)
    second = cmath.sqrt(w) * (bessel_ki(1, 0, x) + bessel_ki(0, 1, x))
    return 2j * (first + second)


def weak_k3_wronskian_term(sigma: float, zeta: complex) -> complex:
    """Second bracket line sqrt(w) (K1 I0 + K0 I1)(2 sqrt w), identically 1/2."""
    w = -1j * complex(zeta) * (sigma - 1j * complex(zeta))
    x = 2 * cmath.sqrt(w)
    return cmath.sqrt(w) * (bessel_ki(1, 0, x) + bessel_ki(0, 1, x))


def weak_k2_v_integral(n: int, sigma: float, zeta: complex) -> complex:
    """int_0^oo exp(-(sigma v^2/2 - i zeta (v + 1/v))) v^n dv.

    For nearly real zeta the path bends off the real axis (towards -i near 0,
    +i near infinity for Re zeta > 0) so the integrand decays at both ends.
    """
    zeta = complex(zeta)
    theta = 0.0
    if zeta.real != 0 and abs(zeta.real) > 1e-3 * zeta.imag:
        theta = math.copysign(0.35, zeta.real)

    def logf(v):
        return -(0.5 * sigma * v * v - 1j * zeta * (v + 1 / v)) + n * np.log(v)

    return specfun.half_line_integral(logf, theta=theta)


def weak_k2_double_sum(r: int, sigma: float, zeta: complex, rtol: float = 1e-14) -> complex:
    """sum_{k,l>=0} (sigma/2)^k m^(2k+2l+1+r) / (k! l! (2k+l+1+r)!), m = -i zeta."""
    m = -1j * complex(zeta)
    total = 0j
    quiet = 0
    k = 0
    while quiet < 5:
        if k > 2000:
            raise SeriesNotConverged("weak K=2 double sum did not converge")
        l = max(0, -(2 * k + 1 + r))
        e = 2 * k + 2 * l + 1 + r
        if sigma == 0 and k > 0:
            break
        # first term of the inner sum, then the ratio recurrence in l
        logmag = (k * math.log(sigma / 2) if k else 0.0) - math.lgamma(k + 1) - math.lgamma(l + 1) \
            - math.lgamma(2 * k + l + 2 + r)
        t = cmath.exp(logmag) * m ** e
        inner = 0j
        small = 0
        while small < 10:
            inner += t
            l += 1
            t *= m * m / (l * (2 * k + l + 1 + r))
            small = small + 1 if abs(t) <= rtol * 1e-2 * max(abs(inner), 1e-300) else 0
        total += inner
        quiet = quiet + 1 if abs(inner) <= rtol * abs(total) else 0
        k += 1
    return total


def _weak_k2(sigma: float, zeta: complex) -> complex:
    if not zeta.imag > 0 and not (zeta.imag == 0 and zeta.real != 0):
        raise DomainError("the weak K=2 limit needs Im zeta > 0")
    coeffs = weak_k2_coefficients(sigma, zeta)
    V = {n: weak_k2_v_integral(n, sigma, zeta) for n in {n for n, _ in coeffs}}
    W = {r: weak_k2_double_sum(r, sigma, zeta) for r in {r for _, r in coeffs}}
    return 0.5j * sum(c * V[n] * W[r] for (n, r), c in coeffs.items() if c != 0)


def limit_resolvent(kind: LimitKind, zeta) -> complex:
    zeta = complex(zeta)
    if not zeta.imag > 0:
        raise DomainError("limit_resolvent needs Im zeta > 0")
    return _evaluate(kind, zeta)


def _evaluate(kind, zeta):
    name = kind.name
    if name == "k1":
        return 1j
    if name == "k2":
        return _k2(zeta)
    if name == "k3":
        return _k3(zeta)
    if name == "chiral":
        return _chiral(zeta)
    if name == "weak-k3":
        return _weak_k3(kind.sigma, zeta)
    return _weak_k2(kind.sigma, zeta)


# ---------------------------------------------------------------- scales and densities

K2_SPACING_CONSTANT = 2 * (2 * math.pi / (3 * math.sqrt(3))) ** 1.5


def conversion_factor(kind: LimitKind) -> float:
    """eta_N / tau_N: spacing units over the scale of the resolvent limit."""
    if kind.name == "k1":
        return math.pi
    if kind.name == "k2":
        return K2_SPACING_CONSTANT
    if kind.name == "k3":
        return math.pi ** 2 / 4
    return math.pi / kind.K


def resolvent_scale(kind: LimitKind, p, N: int) -> float:
    """tau_N such that tau_N E Tr (H - tau_N zeta)^-1 tends to limit_resolvent."""
    S = np.asarray(p.S if isinstance(p, VarianceProfile) else p, dtype=float)
    if kind.name == "k1":
        return math.sqrt(S[0, 0]) / N
    if kind.name == "k2":
        m = match_k2(S) if S.shape == (2, 2) else None
        if m is None:
            raise ConfigError("profile does not have the K=2 singular shape")
        s11, s12 = m
        return s12 / math.sqrt(s11) * N ** -1.5
    if kind.name == "k3":
        m = match_k3(S) if S.shape == (3, 3) else None
        if m is None:
            raise ConfigError("profile does not have the K=3 singular shape")
        s12, s22, s13 = m
        return s13 * math.sqrt(s22) / s12 * N ** -2.0
    return 1.0 / N


def kind_for_profile(p: VarianceProfile) -> LimitKind | None:
    """The fixed-profile limit that applies at the origin, or None for a generic bulk point."""
    S = p.S
    if p.K == 1:
        return K1
    if p.K == 2 and S[0, 0] == 0 and S[1, 1] == 0 and S[0, 1] > 0:
        return CHIRAL
    ell = classify_singularity(p).ell
    return {2: K2, 3: K3}.get(ell)


def weak_profile(kind: LimitKind, N: int) -> np.ndarray:
    """The N-dependent profile whose microscopic limit is the weak kind."""
    s = kind.sigma / N
    if kind.name == "weak-k2":
        return np.array([[s, 1.0], [1.0, 0.0]])
    if kind.name == "weak-k3":
        return np.array([[0.0, s, 1.0], [s, 1.0, 0.0], [1.0, 0.0, 0.0]])
    raise ConfigError(f"{kind} is not a weak kind")


# the chiral-type kinds carry a delta log delta term at xi = 0 that linear
# Richardson leaves as an O(delta) residual, so the offsets are kept small
DELTAS = (1e-8, 5e-9)


def _singular_at_origin(kind):
    return kind.name == "k3" or (kind.name == "weak-k3" and kind.sigma > 0)


def limit_density(kind: LimitKind, xi: float) -> float:
    """Microscopic one-point function at xi (spacing units).

    K=2 is evaluated directly on the boundary, where only the real part of each
    Meijer G enters and that part is continuous across the cut.  All other kinds
    use the first-order Richardson limit of Im zeta -> 0 from the two offsets
    in ``DELTAS``.
    """
    xi = float(xi)
    if xi == 0 and _singular_at_origin(kind):
        raise SingularAtZero(f"{kind} density diverges at xi = 0")
    if kind.name == "k1":
        return 1.0
    c = conversion_factor(kind)
    t = c * xi
    if kind.name == "k2":
        if t == 0:
            # only the G(0, 1/2, 1/2) term survives at x = 0, where it equals Gamma(1/2)^2
            im = math.sqrt(2 / math.pi) * math.pi / 2
        else:
            x = -t * t / 8
            im = math.sqrt(2 / math.pi) * sum(
                w * meijer_g_303(b, x, -1).real * hyper_0f2(*f, x).real for b, f, w in K2_TERMS)
        return c / math.pi * im
    d1, d2 = DELTAS
    v1 = _evaluate(kind, complex(t, d1)).imag
    v2 = _evaluate(kind, complex(t, d2)).imag
    im = v2 + (v2 - v1) * d2 / (d1 - d2)
    return c / math.pi * im


def asymptotic_density(kind: LimitKind, xi: float, regime: str) -> float:
    """Leading small-|xi| ("origin") or large-|xi| ("tail") behaviour."""
    xi = abs(float(xi))
    if xi == 0:
        raise DomainError("xi must be nonzero")
    if regime not in ("origin", "tail"):
        raise ConfigError("regime must be 'origin' or 'tail'")
    if kind.name == "k1":
        return 1.0
    if kind.name == "k2":
        return 4 * math.pi / 3 ** 2.25 if regime == "origin" else 2 ** (2 / 3) / 3 * xi ** (-1 / 3)
    if kind.name == "k3":
        if regime == "origin":
            return -math.pi / 4 * math.log(xi) + math.pi / 2 * (math.log(2 / math.pi) - EULER_GAMMA + 0.5)
        return xi ** -0.5 / (2 * math.sqrt(2))
    raise ConfigError(f"no asymptotic formula for {kind}")


def chiral_density(xi: float) -> float:
    """Chiral GUE one-point function in spacing units, from Bessel J."""
    t = math.pi * abs(float(xi))
    return math.pi * t / 2 * (bessel_j(0, t) ** 2 + bessel_j(1, t) ** 2)


def weak_k3_special(sigma12: float, xi: float) -> float:
    """lim rho_N(xi / (3N)) at sigma12 = 0: a chiral Bessel-J part plus a flat 1/(3 pi)."""
    if sigma12 != 0:
        raise DomainError("the closed form holds for sigma12 = 0 only")
    y = 2 * float(xi) / 3
    return 2 / 9 * abs(xi) * (bessel_j(0, y) ** 2 + bessel_j(1, y) ** 2) + 1 / (3 * math.pi)


# ---------------------------------------------------------------- direct (v, w) integrals
#
# Before the v- and w-integrals are done in closed form the limits read
#
#     R = 1/(8 pi) sum_{u = +-1} sum_terms c V(n) W(r)
#
# with V a Laplace-type integral over v > 0 and W a closed loop integral in w,
# evaluated here as its residue series.  They serve as an independent check.

K2_DIRECT_TERMS = (  # (coefficient builder, v power, w power)
    (lambda m, u: 1, 0, -1),
    (lambda m, u: m, -3, -1),
    (lambda m, u: -1, -2, -1),
    (lambda m, u: 1, -2, 1),
    (lambda m, u: m * u, -2, -2),
    (lambda m, u: 2 * u, -1, 0),
)

K3_DIRECT_TERMS = (
    (lambda m, u: 1, -1, -1),
    (lambda m, u: m, -3, -1),
    (lambda m, u: -1, -2, -1),
    (lambda m, u: u, -2, 0),
    (lambda m, u: m * u, -2, -2),
)


def loop_integral(r: int, t1: complex, t2: complex, p: int, rtol: float = 1e-16) -> complex:
    """oint exp(t1 w^p + t2 / w) w^r dw around the origin, by residues (t1, t2 nonzero)."""
    total = 0j
    k = 0
    small = 0
    while small < 5:
        l = p * k + r + 1
        if l >= 0:
            term = cmath.exp(k * cmath.log(t1) + l * cmath.log(t2) - math.lgamma(k + 1) - math.lgamma(l + 1))
            total += term
            small = small + 1 if abs(term) <= rtol * abs(total) else 0
        k += 1
        if k > 5000:
            raise SeriesNotConverged("loop integral series did not converge")
    return 2j * math.pi * total


def direct_resolvent(kind: LimitKind, zeta) -> complex:
    """K=2 or K=3 limit from the unreduced (v, w) representation."""
    zeta = complex(zeta)
    if not zeta.imag > 0:
        raise DomainError("need Im zeta > 0")
    m = -1j * zeta
    total = 0j
    if kind.name == "k2":
        V = {n: specfun.laplace_type_integral(0.5, m, n, "quadratic") for _, n, _ in K2_DIRECT_TERMS}
        for u in (1, -1):
            for c, n, r in K2_DIRECT_TERMS:
                total += c(m, u) * V[n] * loop_integral(r, 0.5, m * u, 2)
    elif kind.name == "k3":
        V = {n: specfun.laplace_type_integral(1.0, m, n, "linear") for _, n, _ in K3_DIRECT_TERMS}
        for u in (1, -1):
            for c, n, r in K3_DIRECT_TERMS:
                total += c(m, u) * V[n] * loop_integral(r, u, m * u, 1)
    else:
        raise ConfigError(f"no direct representation for {kind}")
    return total / (8 * math.pi)
