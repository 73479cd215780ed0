"""Target covariances for the kernel-approximation bench."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gsk.exceptions import InputError


def ifbm(t, s, hurst: float):
    """Covariance of time-inverted fractional Brownian motion.

    ``0.5 * (t**-2H + s**-2H - |1/t - 1/s|**2H)`` for ``t, s > 0``. Broadcasts.
    """
    if not 0.0 < hurst < 1.0:
        raise InputError(f"hurst must lie in (0, 1), got {hurst}")
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t <= 0) or np.any(s <= 0):
        raise InputError("ifbm is defined only for strictly positive times")
    h2 = 2.0 * hurst
    out = 0.5 * (t**-h2 + s**-h2 - np.abs(1.0 / t - 1.0 / s) ** h2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IFBMKernel:
    hurst: float = 0.5
    d: int = 1

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise InputError(f"hurst must lie in (0, 1), got {self.hurst}")

    def __call__(self, X, Y=None):
        X = np.asarray(X, dtype=float).reshape(-1)
        Y = X if Y is None else np.asarray(Y, dtype=float).reshape(-1)
        return ifbm(X[:, None], Y[None, :], self.hurst)

    def pairs(self, X, Y):
        return ifbm(np.asarray(X, dtype=float).reshape(-1), np.asarray(Y, dtype=float).reshape(-1), self.hurst)


@dataclass(frozen=True)
class EvalGrid:
    """Uniform 1-d grid ``start + step * j`` with all ordered pairs of its points."""

    start: float = 0.01
    step: float = 0.02
    num: int = 50

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.num)

    def pairs(self):
        """Two ``(num**2, 1)`` arrays enumerating every ordered pair (t, s)."""
        t, s = np.meshgrid(self.points, self.points, indexing="ij")
        return t.reshape(-1, 1), s.reshape(-1, 1)


def _pair_values(kernel, T, S):
    if hasattr(kernel, "pairs"):
        return np.asarray(kernel.pairs(T, S), dtype=float).reshape(-1)
    return np.asarray(kernel(T, S), dtype=float).reshape(-1)


def normalized_rmse(candidate, target, grid: EvalGrid = EvalGrid()) -> float:
    """RMSE between two kernels over all grid pairs, divided by the target's grid mean.

    Either argument may be a kernel object exposing ``pairs(T, S)`` or a plain
    callable ``f(T, S)`` evaluated elementwise on ``(N, 1)`` arrays.
    """
    T, S = grid.pairs()
    k_hat = _pair_values(candidate, T, S)
    k = _pair_values(target, T, S)
    return float(np.sqrt(np.mean((k_hat - k) ** 2)) / np.mean(k))
