"""Vector Dyson equation 1/a_i = sum_j s_ij a_j - i z and the limiting density."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, FitDegenerate, NoConvergence, NumericError, WrongBranch
from .model import VarianceProfile

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-13
_COARSE = 1e-6
# below this imaginary part the solve walks down from Im z = 1
_CONTINUATION_BELOW = 1e-2


@dataclass(frozen=True)
class DysonSolution:
    a: np.ndarray
    z: complex
    residual: float
    iterations: int

    @property
    def stieltjes(self) -> complex:
        """(1/K) sum_i a_i, i.e. i times the normalized Stieltjes transform."""
        return complex(self.a.mean())


def residual(S: np.ndarray, a: np.ndarray, z: complex) -> float:
    return float(np.abs(a * (S @ a - 1j * z) - 1).max())


def _damped(S, z, a, tol, max_iter):
    delta, r = 1.0, residual(S, a, z)
    for it in range(1, max_iter + 1):
        if r <= tol:
            return a, r, it - 1
        trial = (1 - delta) * a + delta / (S @ a - 1j * z)
        rt = residual(S, trial, z)
        if rt > r and delta > 1e-3:
            delta = max(delta / 2, 1e-3)
            continue
        a, r = trial, rt
        delta = min(1.0, delta * 1.2)
    return a, r, max_iter


def _newton(S, z, a, tol, max_steps=60):
    # Newton in x = log a: the components may differ by many orders of magnitude
    # near the origin and the log scale equilibrates them.
    x = np.log(a)
    eye = np.eye(len(a))
    r = residual(S, a, z)
    for it in range(max_steps):
        if r <= tol:
            return np.exp(x), r, it
        e = np.exp(x)
        u = S @ e - 1j * z
        F = x + np.log(u)
        J = eye + S * e[None, :] / u[:, None]
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-4:
            trial = x - t * step
            rt = residual(S, np.exp(trial), z)
            if rt < r or t == 1.0 and rt < 10 * r:
                break
            t /= 2
        else:
            break
        x, r = trial, rt
    return np.exp(x), r, max_steps


def _check_branch(a, tol):
    bad = a.real < -max(tol, 1e-14) * np.abs(a)
    if np.any(bad):
        raise WrongBranch(f"solution left the Re a > 0 half-space: {a}")


def solve_dyson(p: VarianceProfile, z: complex, tol: float = DEFAULT_TOL,
                max_iter: int = 20000, a0=None) -> DysonSolution:
    """Solve for the Re a > 0 branch at spectral parameter ``z`` (Im z > 0).

    Damped fixed-point iteration brings the residual to 1e-6, then Newton
    polishes.  With a warm start ``a0`` Newton is tried first.  For small
    Im z the solve walks down from Im z = 1 in geometric steps, warm-starting
    each stage from a log-linear extrapolation of the previous two.
    """
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("solve_dyson needs Im z > 0")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    S = np.asarray(p.S, dtype=complex)
    if a0 is None and z.imag < _CONTINUATION_BELOW:
        return _continuation(p, z, tol, max_iter)
    if a0 is not None:
        a, r, n = _newton(S, z, np.array(a0, dtype=complex), tol)
        if r <= tol and np.all(a.real > 0):
            return DysonSolution(a, z, r, n)
    a = np.full(p.K, 1j / z) if a0 is None else np.array(a0, dtype=complex)
    a, r, n1 = _damped(S, z, a, max(tol, _COARSE), max_iter)
    if r > _COARSE and r > tol:
        raise NoConvergence(f"damped iteration stalled at residual {r:.3g} after {max_iter} steps")
    a, r, n2 = _newton(S, z, a, tol)
    if r > tol:
        a, r, n3 = _damped(S, z, a, tol, max_iter)
        n2 += n3
        if r > tol:
            raise NoConvergence(f"residual {r:.3g} above tolerance {tol:.3g}")
    _check_branch(a, tol)
    return DysonSolution(a, z, r, n1 + n2)


def _continuation(p, z, tol, max_iter, factor=4.0):
    sol = solve_dyson(p, complex(z.real, 1.0), tol, max_iter)
    eta, total, prev = 1.0, sol.iterations, None
    while eta > z.imag:
        nxt = max(eta / factor, z.imag)
        guess = sol.a
        if prev is not None:
            slope = (np.log(sol.a) - np.log(prev)) / math.log(factor)
            guess = np.exp(np.log(sol.a) + slope * math.log(eta / nxt))
        prev = sol.a
        sol = solve_dyson(p, complex(z.real, nxt), tol, max_iter, a0=guess)
        eta, total = nxt, total + sol.iterations
    return DysonSolution(sol.a, z, sol.residual, total)


def density_infinity(p: VarianceProfile, E: float, eps: float, **kw) -> float:
    """(1/pi) Re (1/K) sum_i a_i(E + i eps); no eps extrapolation."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    return solve_dyson(p, complex(E, eps), **kw).stieltjes.real / math.pi


def density_extrapolated(p: VarianceProfile, E: float, eps: float) -> float:
    """Two-point Richardson estimate of the eps -> 0 limit, assuming linear error."""
    r1 = density_infinity(p, E, eps)
    r2 = density_infinity(p, E, eps / 2)
    return max(2 * r2 - r1, 0.0)


def density_at_origin(p: VarianceProfile, eps: float = 1e-9) -> float:
    rho = density_extrapolated(p, 0.0, eps)
    if not rho > 0:
        raise NumericError("limiting density vanishes at the origin")
    return rho


def singularity_fit(p: VarianceProfile, E_grid, eps_schedule=(1e-3, 5e-4)):
    """Fit rho_inf(E) ~ theta |E|^(-sigma) by least squares in log-log scale.

    ``eps_schedule`` holds two imaginary offsets relative to |E|; the density
    at each grid point is the Richardson combination of the two.

    Returns ``(sigma_hat, theta_hat)``.
    """
    E = np.abs(np.asarray(E_grid, dtype=float))
    if E.size < 3 or np.any(E == 0):
        raise ConfigError("E_grid needs at least three nonzero points")
    if E.max() > 1e-2 or math.log10(E.max() / E.min()) < 3 - 1e-9:
        raise ConfigError("E_grid must span at least three decades below 1e-2")
    f1, f2 = eps_schedule
    logE, logR, failed = [], [], 0
    for e in E:
        try:
            r1 = density_infinity(p, e, f1 * e)
            r2 = density_infinity(p, e, f2 * e)
        except NumericError as exc:
            log.warning("dyson solve failed at E=%g: %s", e, exc)
            failed += 1
            continue
        rho = r2 + (r2 - r1) * f2 / (f1 - f2)
        if not rho > 0:
            failed += 1
            continue
        logE.append(math.log(e))
        logR.append(math.log(rho))
    if failed > 0.2 * E.size or len(logE) < 2:
        raise FitDegenerate(f"{failed} of {E.size} grid points unusable")
    slope, intercept = np.polyfit(logE, logR, 1)
    return float(-slope), math.exp(intercept)
