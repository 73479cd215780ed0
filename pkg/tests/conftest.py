import numpy as np
import pytest

from gsk.kernels import BASE_KINDS, NonstationaryGSK, StarKernel, StationaryGSK


def central_difference(f, v, step=1e-6):
    """Central-difference gradient of a scalar function of a flat vector."""
    v = np.asarray(v, dtype=float)
    g = np.empty_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        g[i] = (f(v + e) - f(v - e)) / (2 * step)
    return g


def random_stationary(rng, K=None, d=None, base=None):
    K = K or int(rng.integers(1, 6))
    d = d or int(rng.integers(1, 4))
    base = base or str(rng.choice(BASE_KINDS))
    return StationaryGSK(
        base,
        rng.uniform(0.2, 2.0, K),
        rng.uniform(0.2, 2.0, (K, d)),
        rng.uniform(0.0, 2.0, (K, d)),
    )


def random_nonstationary(rng, K=None, d=None, base=None, star=None):
    K = K or int(rng.integers(1, 6))
    d = d or int(rng.integers(1, 4))
    base = base or str(rng.choice(BASE_KINDS))
    star = star or str(rng.choice(["stationary", "separable"]))
    return NonstationaryGSK(
        StarKernel(star, base),
        rng.uniform(0.2, 2.0, K),
        rng.uniform(0.2, 2.0, (K, d)),
        rng.uniform(-2.0, 2.0, (K, d)),
        rng.uniform(-2.0, 2.0, (K, d)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
