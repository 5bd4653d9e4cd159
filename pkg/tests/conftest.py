import json
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import eval_hermite, gammaln, wofz

from rmblock.model import validate_profile

K2_S = [[1.0, 1.0], [1.0, 0.0]]
K3_S = [[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [1.0, 0.0, 0.0]]


@pytest.fixture
def k1():
    return validate_profile([[1.0]])


@pytest.fixture
def k2():
    return validate_profile(K2_S)


@pytest.fixture
def k3():
    return validate_profile(K3_S)


@pytest.fixture
def profile_file(tmp_path):
    def write(S, name="p.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"K": len(S), "S": S}), encoding="utf-8")
        return path
    return write


def gaussian_stieltjes(z):
    """E 1/(h - z) for a standard real Gaussian h, through the Faddeeva function."""
    return 1j * np.sqrt(np.pi / 2) * wofz(z / np.sqrt(2))


def gue_trace_resolvent(N, z):
    """E Tr (H - z)^-1 for the N x N GUE with E|h_ij|^2 = 1/N, from the Hermite kernel."""
    def density(x):
        # orthonormal Hermite functions for the weight exp(-N x^2 / 2)
        y = x * math.sqrt(N / 2)
        tot = 0.0
        for k in range(N):
            logc = 0.25 * (math.log(N / 2) - math.log(math.pi)) - 0.5 * (k * math.log(2) + gammaln(k + 1))
            tot += (math.exp(logc) * eval_hermite(k, y)) ** 2 * math.exp(-y * y)
        return tot
    re = integrate.quad(lambda x: density(x) * ((1 / (x - z)).real), -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
    im = integrate.quad(lambda x: density(x) * ((1 / (x - z)).imag), -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
    return complex(re, im)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
