import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from rmblock import specfun as sf
from rmblock.errors import BranchCut, ConfigError, DomainError, PoleParameter

mp.mp.dps = 30

ARGS = [0.1, 1.0, 2.0, 3.5, 10.0, 50.0, 0.3 + 0.4j, 1.9 - 0.5j, 5 + 20j, 15 - 3j, 40 + 1j]


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 50.0, 2 + 3j])
def test_wronskian(x):
    w = sf.bessel_ki(1, 0, x) + sf.bessel_ki(0, 1, x)
    assert rel(w, 1 / x) <= 1e-12


def test_k0_small_argument():
    x = 1e-4
    assert abs(sf.bessel_k(0, x) + math.log(x) - math.log(2) + sf.EULER_GAMMA) <= 1e-6


@pytest.mark.parametrize("x", ARGS)
@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_against_mpmath(n, x):
    assert rel(sf.bessel_i(n, x), mp.besseli(n, x)) <= 1e-12
    assert rel(sf.bessel_k(n, x), mp.besselk(n, x)) <= 1e-12


def test_scaled_forms_match_scipy():
    for x in (0.5, 3.0, 30.0, 300.0):
        assert rel(sf.bessel_i_scaled(0, x), special.ive(0, x)) <= 1e-12
        assert rel(sf.bessel_k_scaled(1, x), special.kve(1, x)) <= 1e-12


def test_order_reflection_and_recurrence():
    for x in (0.7, 3 + 1j, 25.0):
        assert sf.bessel_k(-1, x) == sf.bessel_k(1, x)
        assert sf.bessel_i(-1, x) == sf.bessel_i(1, x)
        assert rel(sf.bessel_k(-2, x), 2 / x * sf.bessel_k(1, x) + sf.bessel_k(0, x)) <= 1e-12


@pytest.mark.parametrize("x", [0.5, 7.0, 33.0])
def test_bessel_j(x):
    for n in (0, 1, 2):
        assert abs(sf.bessel_j(n, x) - special.jv(n, x)) <= 1e-12 * max(1, abs(special.jv(n, x)))


def test_crossover_continuity():
    for r, f in ((sf.I_SERIES_RADIUS, sf.bessel_i), (sf.K_SERIES_RADIUS, sf.bessel_k)):
        for phase in (1, np.exp(0.7j)):
            for n in (0, 1):
                a, b = f(n, r * (1 - 1e-12) * phase), f(n, r * (1 + 1e-12) * phase)
                assert rel(a, b) <= 1e-10
    for n in (0, 1):
        a = sf.hyper_0f2(0.5, 1, -sf.HYPER_CONTOUR_RADIUS * (1 - 1e-12))
        b = sf.hyper_0f2(0.5, 1, -sf.HYPER_CONTOUR_RADIUS * (1 + 1e-12))
        assert rel(a, b) <= 1e-10


def test_conjugation_symmetry():
    for x in (0.3 + 0.4j, 5 - 2j, 30 + 7j):
        xc = np.conj(x)
        assert rel(sf.bessel_i(1, xc), np.conj(sf.bessel_i(1, x))) <= 1e-14
        assert rel(sf.bessel_k(0, xc), np.conj(sf.bessel_k(0, x))) <= 1e-14
        assert rel(sf.meijer_g_303((0, 0.5, 0.5), xc), np.conj(sf.meijer_g_303((0, 0.5, 0.5), x))) <= 1e-12
        assert rel(sf.hyper_0f2(0.5, 1, xc), np.conj(sf.hyper_0f2(0.5, 1, x))) <= 1e-12


def test_bessel_domain():
    with pytest.raises(DomainError):
        sf.bessel_k(0, -1 + 1j)
    with pytest.raises(DomainError):
        sf.bessel_k(0, 0)
    with pytest.raises(BranchCut):
        sf.bessel_k(0, -2.0, allow_left=True)
    with pytest.raises(ConfigError):
        sf.bessel_i(3, 1.0)
    assert rel(sf.bessel_k(0, -1 + 1j, allow_left=True), mp.besselk(0, -1 + 1j)) <= 1e-12


G_TRIPLES = [(0, 0.5, 0.5), (0.5, 1, -0.5), (0, 0.5, -0.5), (0, 0.5, 1), (-1, 0.5, 1.5), (0, 0, 0.5)]


@pytest.mark.parametrize("b", G_TRIPLES)
@pytest.mark.parametrize("x", [1e-6, 0.1, 1 + 1j, 5.0, -3 + 0.5j, 200 - 50j, 1e6])
def test_meijer_against_mpmath(b, x):
    ref = mp.meijerg([[], []], [list(b), []], x)
    assert rel(sf.meijer_g_303(b, x), ref) <= 1e-10


@pytest.mark.parametrize("x", [0.1, 1 + 1j, 5.0, 0.02 - 3j, 40.0])
def test_meijer_merge_identity(x):
    g = sf.meijer_g_303
    lhs = g((0.5, 1, -0.5), x) - 0.5 * g((0, 0.5, -0.5), x)
    assert rel(lhs, g((0, 0.5, 0.5), x)) <= 1e-8


def test_meijer_small_argument():
    # G - pi - 2 sqrt(pi x) log x decays like a constant times sqrt(x)
    res = []
    for x in (1e-8, 1e-10):
        r = sf.meijer_g_303((0, 0.5, 0.5), x) - math.pi - 2 * math.sqrt(math.pi * x) * math.log(x)
        assert abs(r) <= 1e-3
        res.append(r.real / math.sqrt(x))
    assert res[0] == pytest.approx(res[1], rel=1e-3)


@pytest.mark.parametrize("x", [-0.5, -3.0, -40.0, -8e5])
def test_meijer_cut(x):
    g = sf.meijer_g_303
    up, down = g((0, 0.5, 0.5), complex(x, 1e-8)), g((0, 0.5, 0.5), complex(x, -1e-8))
    assert abs(up.real - down.real) <= 1e-6 * max(1, abs(up))
    assert rel(g((0, 0.5, 0.5), x, side=1), up) <= 1e-6
    assert rel(g((0, 0.5, 0.5), x, side=-1), np.conj(g((0, 0.5, 0.5), x, side=1))) <= 1e-12
    with pytest.raises(BranchCut):
        g((0, 0.5, 0.5), x)


def test_meijer_parameter_checks():
    with pytest.raises(ConfigError):
        sf.meijer_g_303((0, 0.5), 1.0)
    with pytest.raises(DomainError):
        sf.meijer_g_303((0, 0.5, 0.5), 0)


def factorial_sum(x, terms=80):
    # 0F2(; 1/2, 1; x) since (1/2)_k = (2k)! / (4^k k!)
    return sum(Fraction(4) ** k / (math.factorial(2 * k) * math.factorial(k)) * x ** k for k in range(terms))


def test_hyper_values():
    assert sf.hyper_0f2(0.5, 1, 0) == 1
    assert sf.hyper_0f2(Fraction(3, 2), 2, 0) == 1
    assert rel(sf.hyper_0f2(0.5, 1, 1), float(factorial_sum(Fraction(1)))) <= 1e-14
    assert rel(sf.hyper_0f2(0.5, 1, -7), float(factorial_sum(Fraction(-7)))) <= 1e-12
    x = 1e4
    approx = x ** (-1 / 6) * math.exp(3 * x ** (1 / 3)) / (2 * math.sqrt(3 * math.pi))
    assert sf.hyper_0f2(0.5, 1, x).real == pytest.approx(approx, rel=0.01)


@pytest.mark.parametrize("b", [(0.5, 1), (1, 1.5), (1.5, 2), (1.5, 1), (2, 2.5)])
@pytest.mark.parametrize("x", [-25.0, -300.0, -4e4, 60 + 10j, -1e3j])
def test_hyper_against_mpmath(b, x):
    assert rel(sf.hyper_0f2(*b, x), mp.hyper([], list(b), x)) <= 1e-9


def test_hyper_pole_parameter():
    with pytest.raises(PoleParameter):
        sf.hyper_0f2(0, 1, 1.0)
    with pytest.raises(PoleParameter):
        sf.hyper_0f2(0.5, -2, 1.0)


def test_laplace_examples():
    assert rel(sf.laplace_type_integral(1, 1, 0), 2 * sf.bessel_k(1, 2)) <= 1e-10
    assert rel(sf.laplace_type_integral(1, 1, -1), 2 * sf.bessel_k(0, 2)) <= 1e-10
    ref = sf.meijer_g_303((0, 0.5, 0.5), 0.25) / (2 * math.sqrt(math.pi))
    assert rel(sf.laplace_type_integral(1, 1, 0, "quadratic"), ref) <= 1e-10


@pytest.mark.parametrize("t1, t2, n", [(1, 1, 0), (0.5, 2, -1), (1, 1 + 1j, 1)])
def test_laplace_representations(t1, t2, n):
    for kind in ("linear", "quadratic"):
        quad = sf.laplace_type_integral(t1, t2, n, kind)
        closed = sf.laplace_type_integral(t1, t2, n, kind, closed_form=True)
        assert rel(quad, closed) <= 1e-8
    p = 2
    ref = mp.quad(lambda v: mp.exp(-(t1 * v ** p + t2 / v)) * v ** n, [0, 1, mp.inf])
    assert rel(sf.laplace_type_integral(t1, t2, n, "quadratic"), ref) <= 1e-10


def test_laplace_domain():
    with pytest.raises(DomainError):
        sf.laplace_type_integral(-1, 1, 0)
    with pytest.raises(DomainError):
        sf.laplace_type_integral(1, 1j, 0)
