"""Saddle-point asymptotics of int exp(-N J(u)) F(u) D(u) du over a d-dimensional contour.

The Hessian of J at the critical point is assumed diagonal.  Callers pass
derivative values at u*, not functions.  The leading term is

    (2 pi / N)^(d/2) exp(-N J*) prod_i mu_i / sqrt|h_i| * F D,

and when D(u*) = 0 it is replaced by the same prefactor times c1 / N with

    c1 = sum_i [dF dD / h + F d2D / (2 h) - F dD d3J / (2 h^2)]_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import InvalidProblem, QuadratureFailure

CRITICAL_TOL = 1e-10


def _vec(x, d, name, dtype=complex):
    a = np.atleast_1d(np.asarray(x, dtype=dtype))
    if a.shape != (d,):
        raise InvalidProblem(f"{name} must have {d} entries")
    return a


@dataclass(frozen=True)
class SaddleProblem:
    d: int
    ustar: np.ndarray
    mu: np.ndarray
    J: complex  # J(u*)
    dJ: np.ndarray
    d2J: np.ndarray
    d3J: np.ndarray
    F: complex
    dF: np.ndarray
    D: complex
    dD: np.ndarray
    d2D: np.ndarray

    def __post_init__(self):
        d = self.d
        if d < 1:
            raise InvalidProblem("dimension must be positive")
        for name in ("ustar", "mu", "dJ", "d2J", "d3J", "dF", "dD", "d2D"):
            object.__setattr__(self, name, _vec(getattr(self, name), d, name))
        if np.any(np.abs(self.dJ) > CRITICAL_TOL):
            raise InvalidProblem("u* is not a critical point of J")
        if np.any(np.abs(np.abs(self.mu) - 1) > 1e-12):
            raise InvalidProblem("directions mu must have unit modulus")
        q = self.mu ** 2 * self.d2J
        if np.any(np.abs(q.imag) > 1e-10 * np.abs(q)) or np.any(q.real <= 0):
            raise InvalidProblem("mu^2 d2J must be real and positive")
        if self.F == 0:
            raise InvalidProblem("F(u*) must be nonzero")

    @property
    def h(self) -> np.ndarray:
        return self.d2J

    def shifted(self, c: complex) -> "SaddleProblem":
        """Same problem with J replaced by J + c."""
        return _replace(self, J=self.J + c)

    def flipped(self, i: int) -> "SaddleProblem":
        mu = self.mu.copy()
        mu[i] = -mu[i]
        return _replace(self, mu=mu)


def _replace(sp, **kw):
    fields = {k: getattr(sp, k) for k in SaddleProblem.__dataclass_fields__}
    fields.update(kw)
    return SaddleProblem(**fields)


def prefactor(sp: SaddleProblem, N: float) -> complex:
    return complex((2 * math.pi / N) ** (sp.d / 2) * np.exp(-N * sp.J)
                   * np.prod(sp.mu / np.sqrt(np.abs(sp.h))))


def c1(sp: SaddleProblem) -> complex:
    h = sp.h
    return complex(np.sum(sp.dF * sp.dD / h + sp.F * sp.d2D / (2 * h)
                          - sp.F * sp.dD * sp.d3J / (2 * h * h)))


def leading_term(sp: SaddleProblem, N: float) -> complex:
    if N <= 0:
        raise InvalidProblem("N must be positive")
    if sp.D != 0:
        return prefactor(sp, N) * sp.F * sp.D
    return prefactor(sp, N) * c1(sp) / N


@dataclass
class DecayReport:
    N: np.ndarray
    rel_err: np.ndarray
    exponent: float  # nan when every error is at rounding level
    values: np.ndarray = field(repr=False, default=None)

    def rows(self):
        return list(zip(self.N.tolist(), self.rel_err.tolist()))


def decay_exponent(Ns, errs) -> float:
    Ns, errs = np.asarray(Ns, float), np.asarray(errs, float)
    good = errs > 1e-13
    if good.sum() < 2:
        return float("nan")
    slope = np.polyfit(np.log(Ns[good]), np.log(errs[good]), 1)[0]
    return float(-slope)


def verify_expansion(sp: SaddleProblem, evaluate: Callable[[float], complex],
                     Ns: Sequence[float]) -> DecayReport:
    """Relative error of the leading term against ``evaluate(N)`` on an N-grid."""
    Ns = np.asarray(Ns, dtype=float)
    vals = np.array([complex(evaluate(N)) for N in Ns])
    lead = np.array([leading_term(sp, N) for N in Ns])
    err = np.abs(vals - lead) / np.abs(lead)
    return DecayReport(Ns, err, decay_exponent(Ns, err), vals)


# ---------------------------------------------------------------- quadrature


def tensor_trapezoid(logw: Callable, center: np.ndarray, width: np.ndarray,
                     factor: Callable | None = None, rtol: float = 1e-14,
                     max_level: int = 11) -> complex:
    """Integrate exp(logw(t)) * factor(t) over R^d by tensor trapezoid with step halving.

    ``logw`` and ``factor`` take a list of d broadcastable coordinate grids.
    The box ``center +- width`` must hold everything above 1e-20 of the peak.
    Convergence is judged against the integral of the absolute value, so
    integrands that nearly cancel (a factor vanishing at the peak) still stop.
    """
    d = len(center)
    prev = None
    for level in range(4, max_level + 1):
        n = 2 ** level
        axes = [np.linspace(c - w, c + w, n + 1) for c, w in zip(center, width)]
        grids = np.meshgrid(*axes, indexing="ij", sparse=True)
        lv = logw(grids)
        m = lv.real.max()
        e = np.exp(lv - m)
        if factor is not None:
            e = e * factor(grids)
        cell = np.prod([2 * w / n for w in width]) * np.exp(m)
        val = complex(np.sum(e) * cell)
        mass = float(np.sum(np.abs(e)) * cell)
        if prev is not None and abs(val - prev) <= rtol * mass:
            return val
        prev = val
    raise QuadratureFailure(f"tensor trapezoid did not converge in {d} dimensions")


# ---------------------------------------------------------------- synthetic cases


@dataclass(frozen=True)
class SyntheticCase:
    name: str
    problem: SaddleProblem
    evaluate: Callable[[float], complex]


def _gaussian():
    sp = SaddleProblem(1, [0], [1], 0, [0], [1], [0], 1, [0], 1, [0], [0])

    def evaluate(N):
        s = 1 / math.sqrt(N)
        return tensor_trapezoid(lambda g: -N * g[0] ** 2 / 2, np.zeros(1), np.array([10 * s]))
    return SyntheticCase("gaussian", sp, evaluate)


def _cubic():
    # J(u) = u - log(1 + u) on (-1, oo): J'' = 1, J''' = -2 at u* = 0
    sp = SaddleProblem(1, [0], [1], 0, [0], [1], [-2], 1, [0], 1, [0], [0])

    def evaluate(N):
        # u = e^t - 1, du = e^t dt
        def logf(g):
            t = g[0]
            return -N * (np.expm1(t) - t) + t
        return tensor_trapezoid(logf, np.zeros(1), np.array([14 / math.sqrt(N) + 0.5]))
    return SyntheticCase("cubic", sp, evaluate)


def _k2_shaped():
    # J = sum_i (u_i^2 - 2 log u_i - 1) on (0, oo)^2, u* = (1, 1), J* = 0, h = 4, J''' = -4
    # F = 1 + u1 + u2^2, D = (u1 - 1)^2 + (u2 - 1) so that D(u*) = 0
    sp = SaddleProblem(2, [1, 1], [1, 1], 0, [0, 0], [4, 4], [-4, -4],
                       3, [1, 2], 0, [0, 1], [2, 0])

    def evaluate(N):
        def logw(g):
            t1, t2 = g
            return -N * (np.exp(2 * t1) - 2 * t1 + np.exp(2 * t2) - 2 * t2 - 2) + t1 + t2

        def FD(g):
            u1, u2 = np.exp(g[0]), np.exp(g[1])
            return (1 + u1 + u2 * u2) * ((u1 - 1) ** 2 + (u2 - 1))
        w = 12 / math.sqrt(N) + 0.3
        return tensor_trapezoid(logw, np.zeros(2), np.array([w, w]), FD)
    return SyntheticCase("k2", sp, evaluate)


CASES = {"gaussian": _gaussian, "cubic": _cubic, "k2": _k2_shaped}


def synthetic_case(name: str) -> SyntheticCase:
    try:
        return CASES[name]()
    except KeyError:
        raise InvalidProblem(f"unknown case {name!r}; choose from {sorted(CASES)}") from None


def k2_shaped_exact(N: float) -> float:
    """Closed form of the d=2 synthetic integral through Gamma-function moments."""
    def moment(k):  # e^N int_0^oo u^(2N+k) e^(-N u^2) du
        a = (2 * N + k + 1) / 2
        return math.exp(N + gammaln(a) - a * math.log(N)) / 2
    # F D = (1 + u1 + u2^2)((u1 - 1)^2 + (u2 - 1)) expanded in monomials u1^p u2^q
    terms = {}
    for (p1, q1, c1_) in ((0, 0, 1), (1, 0, 1), (0, 2, 1)):
        for (p2, q2, c2) in ((2, 0, 1), (1, 0, -2), (0, 0, 1), (0, 1, 1), (0, 0, -1)):
            key = (p1 + p2, q1 + q2)
            terms[key] = terms.get(key, 0) + c1_ * c2
    return sum(c * moment(p) * moment(q) for (p, q), c in terms.items() if c)
