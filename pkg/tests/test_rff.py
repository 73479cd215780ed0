import math

import numpy as np
import pytest

from gsk.exceptions import InputError
from gsk.kernels import BaseKernel, NonstationaryGSK, StarKernel, StationaryGSK
from gsk.rff import RFFBasis, estimate_kernel, feature_map, sample_frequencies


def test_se_spectral_draws_reproduce_base():
    # E cos(2 pi eps tau) for the SE draws must equal exp(-2 pi^2 tau^2)
    rng = np.random.default_rng(0)
    eps = BaseKernel("se").sample_spectral(rng, 400_000, 1)[:, 0]
    for tau in (0.1, 0.2, 0.35):
        assert np.cos(2 * np.pi * eps * tau).mean() == pytest.approx(math.exp(-2 * math.pi**2 * tau**2), abs=5e-3)


@pytest.mark.parametrize("kind", ["matern12", "matern32", "matern52"])
def test_matern_spectral_draws_reproduce_base(kind):
    rng = np.random.default_rng(1)
    b = BaseKernel(kind)
    eps = b.sample_spectral(rng, 400_000, 2)
    for r in (0.3, 1.0, 2.0):
        tau = np.array([r, 0.0])
        assert np.cos(2 * np.pi * eps @ tau).mean() == pytest.approx(float(b.value(r)), abs=6e-3)


def test_zero_scale_recovers_sparse_spectrum():
    k = StationaryGSK("se", [1.0], [[0.0]], [[0.7]])
    basis = sample_frequencies(k, 50, seed=0)
    np.testing.assert_allclose(np.abs(basis.frequencies), 0.7)
    tau = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(estimate_kernel(basis, tau), k(tau[:, None], np.zeros((1, 1)))[:, 0], atol=1e-14)


def test_sampled_mean_is_zero():
    k = StationaryGSK("se", [1.0], [[1.0]], [[0.0]])
    m = 1_000_000
    w = sample_frequencies(k, m, seed=3).frequencies[:, 0]
    assert abs(w.mean()) <= 4 * w.std() / math.sqrt(m)


def test_mixture_proportions():
    k = StationaryGSK("se", [3.0, 1.0], [[1e-6], [1e-6]], [[5.0], [20.0]])
    m = 200_000
    w = sample_frequencies(k, m, seed=4).frequencies[:, 0]
    frac = np.mean(np.abs(w) < 10)
    assert abs(frac - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / m)


def test_feature_inner_products():
    k = StationaryGSK("matern32", [2.0], [[1.0]], [[0.4]])
    basis = sample_frequencies(k, 30, seed=0)
    X = np.linspace(-1, 1, 5)[:, None]
    F = feature_map(basis, X)
    assert F.shape == (5, 60)
    np.testing.assert_allclose(np.sum(F**2, axis=1), 2.0, rtol=1e-14)
    single = RFFBasis(np.zeros((1, 1)), 1.5)
    G = feature_map(single, X)
    np.testing.assert_allclose(G @ G.T, 1.5, rtol=1e-14)


def test_estimate_at_zero_is_exact():
    k = StationaryGSK("se", [0.5, 1.5], [[1.0], [2.0]], [[0.1], [1.0]])
    for seed in range(5):
        assert estimate_kernel(sample_frequencies(k, 17, seed), [[0.0]])[0] == 2.0


@pytest.mark.parametrize("kind", ["se", "matern32"])
def test_monte_carlo_error_bound(kind):
    k = StationaryGSK(kind, [1.3], [[1.2]], [[0.5]])
    m = 100_000
    basis = sample_frequencies(k, m, seed=7)
    tau = np.random.default_rng(2).uniform(-2, 2, (20, 1))
    exact = k(tau, np.zeros((1, 1)))[:, 0]
    assert np.max(np.abs(estimate_kernel(basis, tau) - exact)) <= 5 * 1.3 / math.sqrt(m)


def test_feature_map_matches_estimate():
    k = StationaryGSK("matern52", [1.0], [[0.5]], [[0.2]])
    basis = sample_frequencies(k, 64, seed=5)
    x, y = np.array([[0.3]]), np.array([[-0.4]])
    assert (feature_map(basis, x) @ feature_map(basis, y).T)[0, 0] == pytest.approx(estimate_kernel(basis, x - y)[0], abs=1e-14)


def test_seeded_sampling_is_reproducible():
    k = StationaryGSK("se", [1.0], [[1.0]], [[0.5]])
    np.testing.assert_array_equal(sample_frequencies(k, 10, 3).frequencies, sample_frequencies(k, 10, 3).frequencies)


def test_rejects_nonstationary_and_bad_m():
    ns = NonstationaryGSK(StarKernel("separable", "se"), [1.0], [[1.0]], [[0.0]], [[0.0]])
    with pytest.raises(InputError):
        sample_frequencies(ns, 10)
    with pytest.raises(InputError):
        sample_frequencies(StationaryGSK("se", [1.0], [[1.0]], [[0.0]]), 0)
