"""Random Fourier features for stationary generalized spectral kernels.

The spectral density of ``s2 h(tau * gamma) cos(2 pi omega . tau)`` is a
symmetrized copy of the base density, shifted to ``+/- omega`` and scaled by
``gamma``; the kernel's density is the amplitude-weighted mixture of these.
Sampling a component, a sign and a base-density draw therefore samples the
kernel's normalized spectral measure exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gsk.exceptions import InputError
from gsk.kernels import TWO_PI, StationaryGSK, _as_points


@dataclass(frozen=True)
class RFFBasis:
    frequencies: np.ndarray  # (m, d)
    amplitude: float  # total variance sum_k s2_k
    seed: int | None = None

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        if w.ndim != 2 or w.shape[0] < 1:
            raise InputError("an RFF basis needs at least one frequency")
        object.__setattr__(self, "frequencies", w)

    @property
    def n_features(self) -> int:
        return self.frequencies.shape[0]

    @property
    def d(self) -> int:
        return self.frequencies.shape[1]


def sample_frequencies(k: StationaryGSK, m: int, seed=None) -> RFFBasis:
    """Draw ``m`` frequencies from the normalized spectral density of ``k``."""
    if not isinstance(k, StationaryGSK):
        raise InputError("random Fourier features are only defined for stationary kernels")
    if m < 1:
        raise InputError("m must be >= 1")
    rng = np.random.default_rng(seed)
    weights = k.sigma2 / k.sigma2.sum()
    comp = rng.choice(k.n_components, size=m, p=weights)
    sign = rng.choice([-1.0, 1.0], size=(m, 1))
    eps = k.base.sample_spectral(rng, m, k.d)
    w = sign * k.omega[comp] + k.gamma[comp] * eps
    return RFFBasis(w, float(k.sigma2.sum()), seed)


def feature_map(basis: RFFBasis, X) -> np.ndarray:
    """Paired cosine/sine features, shape ``(n, 2m)``: ``[cos..., sin...] * sqrt(s2 / m)``."""
    X = _as_points(X, basis.d)
    phase = TWO_PI * X @ basis.frequencies.T
    scale = np.sqrt(basis.amplitude / basis.n_features)
    return scale * np.hstack([np.cos(phase), np.sin(phase)])


def estimate_kernel(basis: RFFBasis, taus) -> np.ndarray:
    """Monte Carlo kernel estimate ``s2 / m * sum_i cos(2 pi omega_i . tau)`` at each offset."""
    taus = _as_points(taus, basis.d, "taus")
    return basis.amplitude * np.cos(TWO_PI * taus @ basis.frequencies.T).mean(axis=1)
