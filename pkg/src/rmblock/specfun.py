"""Special functions for complex arguments.

Modified Bessel I_n and K_n (integer orders -2..2), the Meijer function
G^{3,0}_{0,3}, the hypergeometric function 0F2, and Laplace-type integrals
over the half line.  All evaluators take Python/numpy scalars.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gamma, loggamma, roots_genlaguerre

from .errors import BranchCut, ConfigError, DomainError, NonConvergent, PoleParameter, SeriesNotConverged

EULER_GAMMA = 0.57721566490153286061

I_SERIES_RADIUS = 12.0
K_SERIES_RADIUS = 2.0
HYPER_CONTOUR_RADIUS = 20.0
_GL_NODES = 64


# ---------------------------------------------------------------- Bessel


def _check_order(n):
    if n not in (-2, -1, 0, 1, 2):
        raise ConfigError(f"Bessel order {n} not supported")
    return abs(n)


def _i_series(n, z):
    t = (z / 2) ** n / math.factorial(n)
    s = t
    q = z * z / 4
    k = 0
    while True:
        k += 1
        t *= q / (k * (k + n))
        s += t
        if abs(t) <= 1e-17 * abs(s) and k > 3:
            return s


def _i_scaled_trapezoid(n, z):
    # e^{-z} I_n(z) = (1/pi) int_0^pi e^{z (cos t - 1)} cos(n t) dt; the even,
    # periodic integrand makes the midpoint rule converge geometrically
    M = int(abs(z)) + 48
    t = np.pi * (np.arange(M) + 0.5) / M
    return complex(np.sum(np.exp(z * (np.cos(t) - 1)) * np.cos(n * t)) / M)


def bessel_i_scaled(n: int, x) -> complex:
    """e^{-x} I_n(x)."""
    n = _check_order(n)
    z = complex(x)
    if abs(z) <= I_SERIES_RADIUS:
        return _i_series(n, z) * cmath.exp(-z)
    return _i_scaled_trapezoid(n, z)


def bessel_i(n: int, x) -> complex:
    """Modified Bessel function of the first kind, integer order."""
    n = _check_order(n)
    z = complex(x)
    if abs(z) <= I_SERIES_RADIUS:
        return _i_series(n, z)
    return _i_scaled_trapezoid(n, z) * cmath.exp(z)


def _k_series(n, z):
    # ascending series with the logarithm and digamma terms
    q = z * z / 4
    lg = cmath.log(z / 2)
    if n == 0:
        t, psi, s = 1.0 + 0j, -EULER_GAMMA, 0j
        k = 0
        while True:
            s += t * psi
            k += 1
            t *= q / (k * k)
            psi += 1.0 / k
            if abs(t) * (abs(psi) + 1) <= 1e-17 * abs(s) and k > 3:
                break
        return -lg * _i_series(0, z) + s
    # n == 1, using psi(k+1) + psi(k+2)
    t, psi1, s = 1.0 + 0j, -EULER_GAMMA, 0j
    k = 0
    while True:
        psi2 = psi1 + 1.0 / (k + 1)
        s += t * (psi1 + psi2)
        k += 1
        t *= q / (k * (k + 1))
        psi1 = psi2
        if abs(t) * (abs(psi1) + 1) <= 1e-17 * abs(s) and k > 3:
            break
    return 1 / z + lg * _i_series(1, z) - z / 4 * s


@lru_cache(maxsize=None)
def _gl_rule(alpha):
    return roots_genlaguerre(_GL_NODES, alpha)


def _k_scaled_laplace(n, z):
    # e^{z} K_n(z) = sqrt(pi/(2z)) / Gamma(n+1/2) int_0^inf e^{-t} t^{n-1/2} (1 + t/(2z))^{n-1/2} dt
    t, w = _gl_rule(n - 0.5)
    f = (1 + t / (2 * z)) ** (n - 0.5)
    return complex(cmath.sqrt(math.pi / (2 * z)) / gamma(n + 0.5) * np.sum(w * f))


def _k_prepare(n, x, allow_left):
    n = _check_order(n)
    z = complex(x)
    if z == 0:
        raise DomainError("K_n is singular at 0")
    if z.real <= 0 and not allow_left:
        raise DomainError("bessel_k needs Re x > 0 (pass allow_left=True for the principal branch)")
    if z.real < 0 and z.imag == 0:
        raise BranchCut("K_n argument on the negative real axis")
    return n, z


def bessel_k_scaled(n: int, x, allow_left: bool = False) -> complex:
    """e^{x} K_n(x)."""
    n, z = _k_prepare(n, x, allow_left)
    if n == 2:
        return 2 / z * bessel_k_scaled(1, z, allow_left) + bessel_k_scaled(0, z, allow_left)
    if abs(z) <= K_SERIES_RADIUS:
        return _k_series(n, z) * cmath.exp(z)
    return _k_scaled_laplace(n, z)


def bessel_k(n: int, x, allow_left: bool = False) -> complex:
    """Modified Bessel function of the second kind, integer order, principal branch."""
    n, z = _k_prepare(n, x, allow_left)
    if n == 2:
        return 2 / z * bessel_k(1, z, allow_left) + bessel_k(0, z, allow_left)
    if abs(z) <= K_SERIES_RADIUS:
        return _k_series(n, z)
    return _k_scaled_laplace(n, z) * cmath.exp(-z)


def bessel_ki(nk: int, ni: int, x) -> complex:
    """K_nk(x) I_ni(x) without overflow for large |x|."""
    z = complex(x)
    return bessel_k_scaled(nk, z) * bessel_i_scaled(ni, z)


def bessel_j(n: int, x: float) -> float:
    """J_n on the real axis via J_n(x) = (-i)^n I_n(i x)."""
    n = _check_order(n)
    return ((-1j) ** n * bessel_i(n, 1j * float(x))).real


# ---------------------------------------------------------------- Meijer G


def as_rational(b) -> Fraction:
    f = Fraction(b).limit_denominator(64)
    if abs(float(f) - float(b)) > 1e-15:
        raise ConfigError(f"parameter {b!r} is not a small rational")
    return f


def _log_argument(x, side):
    x = complex(x)
    if x == 0:
        raise DomainError("Meijer G argument must be nonzero")
    if x.imag == 0 and x.real < 0:
        if side not in (1, -1):
            raise BranchCut("argument on the negative real axis needs side=+1 or side=-1")
        return complex(math.log(-x.real), side * math.pi)
    return cmath.log(x)


def meijer_g_303(b, x, side: int = 0) -> complex:
    """G^{3,0}_{0,3}(x | b1, b2, b3) by Mellin-Barnes quadrature.

    The integrand Gamma(b1-s)Gamma(b2-s)Gamma(b3-s) x^s is integrated along a
    vertical line to the left of all poles, placed near the saddle of the
    integrand so that |x| up to 1e6 needs no cancellation.  Negative real x
    needs ``side`` = +1 or -1 to select the boundary value from above or below.
    """
    bs = np.array([float(as_rational(v)) for v in b])
    if bs.size != 3:
        raise ConfigError("need three lower parameters")
    L = _log_argument(x, side)
    c = cmath.exp(L / 3)
    sig = min(bs.min() - 0.5, bs.mean() - c.real)
    d = bs.min() - sig
    # trapezoid step: resolve the strip to the nearest pole and the oscillation of x^s
    h = 2 * math.pi * d / (40 + d * abs(L.real) + d * abs(L.imag))

    def logf(t):
        s = sig + 1j * t
        return loggamma(bs[0] - s) + loggamma(bs[1] - s) + loggamma(bs[2] - s) + s * L

    # the saddle sits at height -Im c; grow each side until it is below 1e-18 of the peak
    t0 = -c.imag
    probe = logf(t0 + np.linspace(-3 * (1 + abs(c)), 3 * (1 + abs(c)), 201)).real.max()
    ends = []
    for direction in (1.0, -1.0):
        span = 4.0
        while logf(t0 + direction * span).real - probe > -42:
            span *= 1.3
            if span > 1e8:
                raise NonConvergent("Mellin-Barnes tail did not decay")
        ends.append(t0 + direction * span)
    t = t0 + h * np.arange(math.floor((ends[1] - t0) / h), math.ceil((ends[0] - t0) / h) + 1)
    lf = logf(t)
    m = lf.real.max()
    return complex(np.sum(np.exp(lf - m)) * h / (2 * math.pi) * np.exp(m))


# ---------------------------------------------------------------- 0F2


def _pochhammer_poles(b):
    return b <= 0 and b == int(b)


def _hyper_series(b1, b2, x):
    t = 1.0 + 0j
    s = t
    k = 0
    small = 0
    biggest = 1.0
    while small < 10:
        t *= x / ((b1 + k) * (b2 + k) * (k + 1))
        k += 1
        s += t
        biggest = max(biggest, abs(t))
        small = small + 1 if abs(t) <= 1e-16 * abs(s) else 0
        if k > 100000:
            raise SeriesNotConverged("0F2 series did not converge")
    # rounding in the largest term bounds the attainable accuracy
    if biggest * 1e-16 > 1e-8 * abs(s):
        raise SeriesNotConverged(f"0F2 series lost too many digits to cancellation at x={x}")
    return s


def _half_pair(b1, b2):
    # (b, b+1/2) with 2b a positive integer admits a single-valued contour integral
    lo, hi = sorted((b1, b2))
    if hi - lo == Fraction(1, 2) and (2 * lo).denominator == 1 and lo > 0:
        return int(2 * lo)
    return None


def _hyper_contour(n2, y):
    # 0F2(; b, b+1/2; y) = Gamma(2b)/(2 pi i) oint e^{w + 4y/w^2} w^{-2b} dw, n2 = 2b
    if y == 0:
        return 1.0 + 0j
    r = np.roots([1, -n2, 0, -8 * y])
    ex = r + 4 * y / r ** 2 - n2 * np.log(r)
    rho = max(abs(r[np.argmax(ex.real)]), 1.0)
    M = int(4 * rho + 64)
    M += M % 2
    w = rho * np.exp(2j * np.pi * np.arange(M) / M)
    lg = w + 4 * y / w ** 2 - (n2 - 1) * np.log(w)
    m = lg.real.max()
    return complex(math.gamma(n2) * np.sum(np.exp(lg - m)) / M * np.exp(m))


def hyper_0f2(b1, b2, x) -> complex:
    """0F2(; b1, b2; x).

    Power series by default.  For large |x| and the parameter pairs
    (b, b + 1/2) the series cancels badly on the negative axis, and a circle
    contour through the saddle point is used instead.
    """
    f1, f2 = as_rational(b1), as_rational(b2)
    if _pochhammer_poles(f1) or _pochhammer_poles(f2):
        raise PoleParameter("0F2 parameters must not be nonpositive integers")
    x = complex(x)
    n2 = _half_pair(f1, f2)
    if n2 is not None and abs(x) > HYPER_CONTOUR_RADIUS:
        return _hyper_contour(n2, x)
    return _hyper_series(float(f1), float(f2), x)


# ---------------------------------------------------------------- half-line integrals


def half_line_integral(logf, rtol: float = 1e-13, theta: float = 0.0, center: float = 1.0):
    """Integrate exp(logf(v)) over v in (0, inf) along v = c exp(u + i theta tanh u).

    With theta = 0 this is the real half line.  A nonzero theta bends the path
    into the lower half plane near 0 and the upper half plane near infinity,
    which can damp integrands that only oscillate on the real axis.  The
    integrand must decay double-exponentially in u at both ends, as it does for
    all the Laplace-type integrals used here.  Trapezoid in u with step halving.
    """
    def path(u):
        v = center * np.exp(u + 1j * theta * np.tanh(u))
        dv = v * (1 + 1j * theta / np.cosh(u) ** 2)
        return v, dv

    # find the extent where the integrand is above 1e-20 of its peak
    u = np.linspace(-40, 40, 1601)
    v, dv = path(u)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        lv = logf(v) + np.log(dv)
    lr = np.where(np.isfinite(lv.real), lv.real, -np.inf)
    peak = lr.max()
    if not np.isfinite(peak):
        raise NonConvergent("integrand is not finite anywhere on the path")
    keep = u[lr > peak - 46]
    a, b = keep[0] - 0.1, keep[-1] + 0.1
    prev = None
    for level in range(4, 16):
        n = 2 ** level
        uu = np.linspace(a, b, n + 1)
        v, dv = path(uu)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            lv = logf(v) + np.log(dv)
        lv = np.where(np.isfinite(lv.real), lv, -np.inf)
        m = lv.real.max()
        val = np.sum(np.exp(lv - m)) * (b - a) / n * np.exp(m)
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return complex(val)
        prev = val
    raise NonConvergent("half-line quadrature did not converge")


def laplace_type_integral(t1, t2, n: int, kind: str = "linear", closed_form: bool = False) -> complex:
    """int_0^inf exp(-(t1 v^p + t2 / v)) v^n dv with p = 1 ("linear") or 2 ("quadratic").

    ``closed_form=True`` returns the Bessel (linear) or Meijer G (quadratic)
    expression instead of the quadrature value.
    """
    t1, t2 = complex(t1), complex(t2)
    if not (t1.real > 0 and t2.real > 0):
        raise DomainError("need Re t1 > 0 and Re t2 > 0")
    if kind not in ("linear", "quadratic"):
        raise ConfigError("kind must be 'linear' or 'quadratic'")
    p = 1 if kind == "linear" else 2
    if closed_form:
        if p == 1:
            return 2 * (t2 / t1) ** ((n + 1) / 2) * bessel_k(abs(n + 1), 2 * cmath.sqrt(t1 * t2))
        return (t1 ** (-(n + 1) / 2) / (2 * math.sqrt(math.pi))
                * meijer_g_303((0, Fraction(1, 2), Fraction(n + 1, 2)), t1 * t2 * t2 / 4))
    center = abs(t2 / t1) ** (1 / (p + 1))
    return half_line_integral(lambda v: -(t1 * v ** p + t2 / v) + n * np.log(v), center=center)
