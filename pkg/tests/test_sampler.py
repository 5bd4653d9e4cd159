import math

import numpy as np
import pytest

from conftest import gaussian_stieltjes
from rmblock import sampler
from rmblock.errors import ConfigError, DomainError
from rmblock.model import validate_profile


def test_scalar_case_has_unit_variance(k1):
    h = sampler.sample_eigenvalues(k1, 1, 100_000, seed=42)[:, 0]
    se = math.sqrt(2 / h.size)
    assert abs(h.var() - 1) < 3 * se
    assert abs(h.mean()) < 3 / math.sqrt(h.size)


@pytest.mark.parametrize("S", [[[1.0, 1.0], [1.0, 0.0]], [[0.5, 2.0, 1.0], [2.0, 0.0, 0.3], [1.0, 0.3, 1.5]]])
def test_second_moment(S):
    p = validate_profile(S)
    N, T = 4, 10_000
    eigs = sampler.sample_eigenvalues(p, N, T, seed=9)
    per_trial = (eigs ** 2).sum(axis=1) / (p.K * N)
    expected = p.S.sum() / p.K
    assert abs(per_trial.mean() - expected) < 3 * per_trial.std(ddof=1) / math.sqrt(T)


def test_matrix_structure():
    p = validate_profile([[0, 1], [1, 0]])
    H = sampler.sample_block_matrix(p, 5, seed=1, trial=3)
    assert np.array_equal(H, H.conj().T)
    assert np.all(H[:5, :5] == 0) and np.all(H[5:, 5:] == 0)
    assert np.any(H[:5, 5:] != 0)


def test_sample_is_deterministic():
    p = validate_profile([[1, 1], [1, 0]])
    a = sampler.sample_block_matrix(p, 6, seed=7, trial=11)
    b = sampler.sample_block_matrix(p, 6, seed=7, trial=11)
    c = sampler.sample_block_matrix(p, 6, seed=7, trial=12)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_trials_independent_of_batching_and_threads(k2):
    full = sampler.sample_eigenvalues(k2, 6, 40, seed=5, threads=1)
    again = sampler.sample_eigenvalues(k2, 6, 40, seed=5, threads=2)
    prefix = sampler.sample_eigenvalues(k2, 6, 15, seed=5, threads=1)
    assert np.array_equal(full, again)
    assert np.array_equal(full[:15], prefix)


def test_box_muller_moments():
    g = sampler.box_muller(sampler.trial_generator(3, 0), 200_001)
    assert g.size == 200_001
    assert abs(g.mean()) < 4 / math.sqrt(g.size)
    assert abs(g.var() - 1) < 4 * math.sqrt(2 / g.size)


def test_mc_scalar_oracle(k1):
    z = 0.5j
    est = sampler.mc_resolvent_trace(k1, 1, z, 100_000, seed=2)
    exact = gaussian_stieltjes(z)
    assert abs(est.mean.real - exact.real) < 3 * est.stderr
    assert abs(est.mean.imag - exact.imag) < 3 * est.stderr
    assert est.trials == 100_000


def test_mc_purely_imaginary_on_axis(k2):
    est = sampler.mc_resolvent_trace(k2, 4, 0.3j, 20_000, seed=4)
    assert abs(est.mean.real) < 3 * est.stderr


def test_reflection_per_sample(k3):
    eigs = sampler.sample_eigenvalues(k3, 3, 2000, seed=8)
    z = 0.4 + 0.2j
    a = sampler.resolvent_samples(eigs, z)
    # exact per sample: conjugation, and reflection paired with H -> -H
    assert np.array_equal(sampler.resolvent_samples(eigs, z.conjugate()), a.conj())
    assert np.array_equal(sampler.resolvent_samples(-eigs, -z.conjugate()), -a.conj())
    # and in distribution H and -H agree, so the reflected estimate matches within error
    est_a = sampler.estimate(a)
    est_b = sampler.estimate(sampler.resolvent_samples(eigs, -z.conjugate()))
    assert abs(est_b.mean + est_a.mean.conjugate()) < 3 * (est_a.stderr + est_b.stderr)


def test_mc_argument_checks(k1):
    with pytest.raises(DomainError):
        sampler.mc_resolvent_trace(k1, 2, 0.5, 10, seed=0)
    with pytest.raises(ConfigError):
        sampler.mc_resolvent_trace(k1, 2, 0.5j, 1, seed=0)
    with pytest.raises(ConfigError):
        sampler.trial_generator(-1, 0)


def test_macroscopic_semicircle(k1):
    edges = np.linspace(-3, 3, 31)
    h = sampler.macroscopic_histogram(k1, 200, 100, edges, seed=1)
    c = h.centers
    sc = np.sqrt(np.clip(4 - c ** 2, 0, None)) / (2 * math.pi)
    inner = np.abs(c) < 1.6
    assert np.max(np.abs(h.density[inner] - sc[inner])) < 0.02
    assert np.sum(h.density * h.widths) == pytest.approx(1.0, abs=1e-12)


def test_macroscopic_total_mass_below_one(k2):
    h = sampler.macroscopic_histogram(k2, 20, 20, np.linspace(-1, 1, 11), seed=1)
    assert np.sum(h.density * h.widths) < 1


def test_edges_must_increase(k1):
    with pytest.raises(ConfigError):
        sampler.macroscopic_histogram(k1, 4, 2, [0, 1, 1, 2], seed=0)


def test_microscopic_gue_is_flat(k1):
    edges = np.linspace(-10, 10, 11)
    h = sampler.microscopic_histogram(k1, 100, 200, edges, seed=3)
    assert h.normalization == "microscopic"
    assert h.eta == pytest.approx(math.pi / 100)
    # about 400 eigenvalues per bin with strong level repulsion
    assert np.max(np.abs(h.density - 1)) < 0.1
    assert np.max(np.abs(h.density - h.density[::-1])) < 0.15
