"""Generalized spectral kernels.

Two families are provided, both mixtures of ``K`` spectral components:

* :class:`StationaryGSK` -- ``k(tau) = sum_k s2_k h(tau * gamma_k) cos(2 pi omega_k . tau)``
* :class:`NonstationaryGSK` -- ``k(x, y) = sum_k s2_k k*(x * gamma_k, y * gamma_k) Psi_k(x) . Psi_k(y)``
  with ``Psi_k(x) = (cos 2 pi x.w1 + cos 2 pi x.w2, sin 2 pi x.w1 + sin 2 pi x.w2)``.

``h`` is a :class:`BaseKernel` (squared exponential or Matern 1/2, 3/2, 5/2) and
``k*`` a :class:`StarKernel`. Frequencies are in cycles per input unit.

Hyperparameters are exposed as a flat vector (see :func:`pack`), with positive
quantities in log-space. Per component the layout is::

    stationary:     [log s2, log gamma[0..d), log omega[0..d)]
    nonstationary:  [log s2, log gamma[0..d), omega1[0..d), omega2[0..d)]
    sparse spectrum: [log s2, omega_1[0..d), ..., omega_K[0..d)]   (one shared s2)

followed by ``log noise_variance`` when a noise variance is packed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from gsk.exceptions import InputError

TWO_PI = 2.0 * np.pi
# log-space floor for nonnegative parameters; keeps pack/unpack finite and bijective
FLOOR = 1e-12
SCHEMA_VERSION = 1

BASE_KINDS = ("se", "matern12", "matern32", "matern52")
STAR_VARIANTS = ("stationary", "separable")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _log_floor(a) -> np.ndarray:
    return np.log(np.maximum(np.asarray(a, dtype=float), FLOOR))


@dataclass(frozen=True)
class BaseKernel:
    """Isotropic modulating function ``h(r)`` with ``h(0) = 1``, ``r = ||tau||``.

    ``kind`` is one of ``"se"`` (``exp(-2 pi^2 r^2)``), ``"matern12"``,
    ``"matern32"`` or ``"matern52"`` (unit-scale closed forms).
    """

    kind: str = "se"

    def __post_init__(self):
        if self.kind not in BASE_KINDS:
            raise InputError(f"unknown base kernel {self.kind!r}; expected one of {BASE_KINDS}")

    @property
    def nu(self) -> float | None:
        return {"matern12": 0.5, "matern32": 1.5, "matern52": 2.5}.get(self.kind)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "se":
            return np.exp(-2.0 * np.pi**2 * r**2)
        if self.kind == "matern12":
            return np.exp(-r)
        if self.kind == "matern32":
            a = np.sqrt(3.0) * r
            return (1.0 + a) * np.exp(-a)
        a = np.sqrt(5.0) * r
        return (1.0 + a + a**2 / 3.0) * np.exp(-a)

    def deriv(self, r):
        """dh/dr. For Matern 1/2 this is the right derivative ``-1`` at ``r = 0``."""
        r = np.asarray(r, dtype=float)
        if self.kind == "se":
            return -4.0 * np.pi**2 * r * np.exp(-2.0 * np.pi**2 * r**2)
        if self.kind == "matern12":
            return -np.exp(-r)
        if self.kind == "matern32":
            return -3.0 * r * np.exp(-np.sqrt(3.0) * r)
        a = np.sqrt(5.0) * r
        return -(5.0 / 3.0) * r * (1.0 + a) * np.exp(-a)

    def sample_spectral(self, rng: np.random.Generator, size: int, d: int) -> np.ndarray:
        """Draw ``size`` frequencies from the normalized spectral density of ``h``.

        The SE density is standard normal; Matern-nu is a multivariate Student-t
        with ``2 nu`` degrees of freedom scaled by ``1 / (2 pi)``.
        """
        z = rng.standard_normal((size, d))
        if self.kind == "se":
            return z
        dof = 2.0 * self.nu
        u = rng.chisquare(dof, size=(size, 1))
        return z * np.sqrt(dof / u) / TWO_PI


def eval_base(base: BaseKernel, tau) -> float:
    """``h(tau)`` for a single offset vector."""
    return float(base.value(np.linalg.norm(np.atleast_1d(np.asarray(tau, dtype=float)))))


def _scaled_radius(u: np.ndarray):
    """Norm over the last axis plus ``u**2 / r`` with the ``r = 0`` limit set to 0."""
    u2 = u**2
    r = np.sqrt(u2.sum(axis=-1))
    safe = np.where(r > 0, r, 1.0)
    return r, u2 / safe[..., None]


@dataclass(frozen=True)
class StarKernel:
    """Bivariate envelope ``k*(x, y)``.

    ``"stationary"`` wraps the base as ``h(x - y)``; ``"separable"`` uses
    ``h(x) h(y)``. Both satisfy ``k*(0, 0) = 1``.
    """

    variant: str = "separable"
    base: BaseKernel = field(default_factory=BaseKernel)

    def __post_init__(self):
        if self.variant not in STAR_VARIANTS:
            raise InputError(f"unknown star variant {self.variant!r}; expected one of {STAR_VARIANTS}")
        if isinstance(self.base, str):
            object.__setattr__(self, "base", BaseKernel(self.base))

    def __call__(self, x, y) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if self.variant == "stationary":
            return float(self.base.value(np.linalg.norm(x - y)))
        return float(self.base.value(np.linalg.norm(x)) * self.base.value(np.linalg.norm(y)))

    def scaled(self, A: np.ndarray, B: np.ndarray, gamma: np.ndarray, grad: bool = True):
        """Evaluate ``k*(a * gamma_k, b * gamma_k)`` for every component.

        ``A`` and ``B`` broadcast with shape ``(..., d)``; ``gamma`` is ``(K, d)``.
        Returns values ``(..., K)`` and, if requested, derivatives with respect
        to ``log gamma`` of shape ``(..., K, d)``.
        """
        base = self.base
        if self.variant == "stationary":
            u = (A - B)[..., None, :] * gamma
            r, u2r = _scaled_radius(u)
            S = base.value(r)
            dS = base.deriv(r)[..., None] * u2r if grad else None
            return S, dS
        ux = A[..., None, :] * gamma
        uy = B[..., None, :] * gamma
        rx, ux2r = _scaled_radius(ux)
        ry, uy2r = _scaled_radius(uy)
        hx, hy = base.value(rx), base.value(ry)
        S = hx * hy
        if not grad:
            return S, None
        dS = (base.deriv(rx) * hy)[..., None] * ux2r + (hx * base.deriv(ry))[..., None] * uy2r
        return S, dS


def _as_points(X, d: int, name: str = "X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and d == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InputError(f"{name} must be a 2-D array of shape (n, {d}), got shape {X.shape}")
    if X.shape[1] != d:
        raise InputError(f"{name} has {X.shape[1]} columns but the kernel has input dimension {d}")
    return X


def _as_vector(v, d: int, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != (d,):
        raise InputError(f"{name} must have length {d}, got shape {v.shape}")
    return v


class _Kernel:
    """Evaluation front end shared by all kernel types.

    Subclasses implement ``_evaluate(A, B, grad)`` on broadcastable ``(..., d)``
    arrays, returning values ``(...)`` and optionally gradients ``(..., P)``.
    """

    d: int

    def __call__(self, X, Y=None) -> np.ndarray:
        X = _as_points(X, self.d)
        Y = X if Y is None else _as_points(Y, self.d, "Y")
        return self._evaluate(X[:, None, :], Y[None, :, :], grad=False)[0]

    def pairs(self, X, Y) -> np.ndarray:
        """Values ``k(x_i, y_i)`` for aligned rows."""
        X = _as_points(X, self.d)
        Y = _as_points(Y, self.d, "Y")
        if X.shape != Y.shape:
            raise InputError(f"paired inputs must have equal shapes, got {X.shape} and {Y.shape}")
        return self._evaluate(X, Y, grad=False)[0]

    def diag(self, X) -> np.ndarray:
        X = _as_points(X, self.d)
        return self._evaluate(X, X, grad=False)[0]

    def gradient(self, X, Y=None) -> np.ndarray:
        """Derivatives of the Gram matrix, shape ``(n, m, n_params)``."""
        X = _as_points(X, self.d)
        Y = X if Y is None else _as_points(Y, self.d, "Y")
        return self._evaluate(X[:, None, :], Y[None, :, :], grad=True)[1]

    def pairs_with_gradient(self, X, Y):
        X = _as_points(X, self.d)
        Y = _as_points(Y, self.d, "Y")
        if X.shape != Y.shape:
            raise InputError(f"paired inputs must have equal shapes, got {X.shape} and {Y.shape}")
        return self._evaluate(X, Y, grad=True)

    @property
    def n_params(self) -> int:
        return self.free_params().size


def _check_components(sigma2, gamma, *freqs, d=None):
    sigma2 = np.atleast_1d(np.asarray(sigma2, dtype=float))
    if sigma2.ndim != 1 or sigma2.size < 1:
        raise InputError("at least one spectral component is required")
    K = sigma2.size
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim == 1:
        gamma = gamma[:, None] if gamma.size == K else gamma[None, :]
    if d is None:
        d = gamma.shape[-1]
    out = []
    for name, a in (("gamma", gamma),) + tuple(freqs):
        a = np.asarray(a, dtype=float)
        if a.ndim == 1:
            a = a.reshape(K, d) if a.size == K * d else a
        if a.shape != (K, d):
            raise InputError(f"{name} must have shape ({K}, {d}), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError(f"{name} contains non-finite values")
        out.append(a)
    if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
        raise InputError("sigma2 must be strictly positive and finite")
    if np.any(out[0] < 0):
        raise InputError("gamma must be nonnegative")
    return sigma2, out, d


class StationaryGSK(_Kernel):
    """Stationary generalized spectral kernel.

    Parameters
    ----------
    base : BaseKernel or str
        Modulating function ``h``.
    sigma2 : array of shape (K,)
        Component amplitudes, strictly positive.
    gamma : array of shape (K, d)
        Inverse input scales, nonnegative.
    omega : array of shape (K, d)
        Frequencies, nonnegative.
    """

    def __init__(self, base, sigma2, gamma, omega):
        self.base = base if isinstance(base, BaseKernel) else BaseKernel(base)
        sigma2, (gamma, omega), d = _check_components(sigma2, gamma, ("omega", omega))
        if np.any(omega < 0):
            raise InputError("stationary frequencies must be nonnegative")
        self.sigma2 = _frozen(sigma2)
        self.gamma = _frozen(gamma)
        self.omega = _frozen(omega)
        self.d = d

    @property
    def n_components(self) -> int:
        return self.sigma2.size

    @property
    def components(self):
        return list(zip(self.sigma2, self.gamma, self.omega))

    def __repr__(self):
        return f"StationaryGSK(base={self.base.kind!r}, K={self.n_components}, d={self.d})"

    def at(self, tau) -> float:
        """``k(tau)`` for a single offset vector."""
        tau = _as_vector(tau, self.d, "tau")
        return float(self._evaluate(tau, np.zeros_like(tau), grad=False)[0])

    def _evaluate(self, A, B, grad):
        tau = A - B
        u = tau[..., None, :] * self.gamma
        r, u2r = _scaled_radius(u)
        h = self.base.value(r)
        phase = TWO_PI * np.einsum("...d,kd->...k", tau, self.omega)
        c = np.cos(phase)
        val = (self.sigma2 * h * c).sum(axis=-1)
        if not grad:
            return val, None
        s2 = self.sigma2
        g_s2 = s2 * h * c
        g_gam = (s2 * c * self.base.deriv(r))[..., None] * u2r
        g_om = (-s2 * h * np.sin(phase))[..., None] * TWO_PI * tau[..., None, :] * self.omega
        G = np.concatenate([g_s2[..., None], g_gam, g_om], axis=-1)
        return val, G.reshape(G.shape[:-2] + (-1,))

    def free_params(self) -> np.ndarray:
        blocks = np.concatenate(
            [np.log(self.sigma2)[:, None], _log_floor(self.gamma), _log_floor(self.omega)], axis=1
        )
        return blocks.ravel()

    def with_params(self, v) -> "StationaryGSK":
        K, d = self.n_components, self.d
        v = np.asarray(v, dtype=float).reshape(K, 1 + 2 * d)
        e = np.exp(v)
        return StationaryGSK(self.base, e[:, 0], e[:, 1 : 1 + d], e[:, 1 + d :])


class NonstationaryGSK(_Kernel):
    """Nonstationary generalized spectral kernel.

    Parameters
    ----------
    star : StarKernel
        Envelope ``k*``; the separable variant admits finite-basis inference.
    sigma2 : array of shape (K,)
    gamma : array of shape (K, d)
    omega1, omega2 : arrays of shape (K, d)
        Frequency pairs; unconstrained reals.
    """

    def __init__(self, star, sigma2, gamma, omega1, omega2):
        if not isinstance(star, StarKernel):
            raise InputError("star must be a StarKernel")
        self.star = star
        sigma2, (gamma, omega1, omega2), d = _check_components(
            sigma2, gamma, ("omega1", omega1), ("omega2", omega2)
        )
        self.sigma2 = _frozen(sigma2)
        self.gamma = _frozen(gamma)
        self.omega1 = _frozen(omega1)
        self.omega2 = _frozen(omega2)
        self.d = d

    @property
    def base(self) -> BaseKernel:
        return self.star.base

    @property
    def separable(self) -> bool:
        return self.star.variant == "separable"

    @property
    def n_components(self) -> int:
        return self.sigma2.size

    @property
    def components(self):
        return list(zip(self.sigma2, self.gamma, self.omega1, self.omega2))

    def __repr__(self):
        return (
            f"NonstationaryGSK(star={self.star.variant!r}, base={self.base.kind!r}, "
            f"K={self.n_components}, d={self.d})"
        )

    def at(self, x, y, method: str = "psi") -> float:
        """``k(x, y)`` for single points, via Psi products or the four-cosine expansion."""
        x = _as_vector(x, self.d, "x")
        y = _as_vector(y, self.d, "y")
        if method == "psi":
            return float(self._evaluate(x, y, grad=False)[0])
        if method != "expanded":
            raise InputError(f"unknown method {method!r}")
        S, _ = self.star.scaled(x, y, self.gamma, grad=False)
        a1, a2 = self.omega1 @ x, self.omega2 @ x
        b1, b2 = self.omega1 @ y, self.omega2 @ y
        P = (
            np.cos(TWO_PI * (a1 - b1))
            + np.cos(TWO_PI * (a1 - b2))
            + np.cos(TWO_PI * (a2 - b1))
            + np.cos(TWO_PI * (a2 - b2))
        )
        return float(np.sum(self.sigma2 * S * P))

    def _evaluate(self, A, B, grad):
        S, dS = self.star.scaled(A, B, self.gamma, grad=grad)
        pa1 = TWO_PI * np.einsum("...d,kd->...k", A, self.omega1)
        pa2 = TWO_PI * np.einsum("...d,kd->...k", A, self.omega2)
        pb1 = TWO_PI * np.einsum("...d,kd->...k", B, self.omega1)
        pb2 = TWO_PI * np.einsum("...d,kd->...k", B, self.omega2)
        ca1, sa1, ca2, sa2 = np.cos(pa1), np.sin(pa1), np.cos(pa2), np.sin(pa2)
        cb1, sb1, cb2, sb2 = np.cos(pb1), np.sin(pb1), np.cos(pb2), np.sin(pb2)
        xa_c, xa_s = ca1 + ca2, sa1 + sa2
        yb_c, yb_s = cb1 + cb2, sb1 + sb2
        P = xa_c * yb_c + xa_s * yb_s
        s2 = self.sigma2
        val = (s2 * S * P).sum(axis=-1)
        if not grad:
            return val, None
        g_s2 = s2 * S * P
        g_gam = (s2 * P)[..., None] * dS
        # dP/domega^i_j = 2 pi a_j (cos pa_i Psi_s(b) - sin pa_i Psi_c(b)) + 2 pi b_j (...)
        wa1 = ca1 * yb_s - sa1 * yb_c
        wb1 = xa_s * cb1 - xa_c * sb1
        wa2 = ca2 * yb_s - sa2 * yb_c
        wb2 = xa_s * cb2 - xa_c * sb2
        coef = TWO_PI * s2 * S
        A_ = A[..., None, :]
        B_ = B[..., None, :]
        g_w1 = coef[..., None] * (wa1[..., None] * A_ + wb1[..., None] * B_)
        g_w2 = coef[..., None] * (wa2[..., None] * A_ + wb2[..., None] * B_)
        g_s2, g_gam, g_w1, g_w2 = np.broadcast_arrays(g_s2[..., None], g_gam, g_w1, g_w2)
        G = np.concatenate([g_s2[..., :1], g_gam, g_w1, g_w2], axis=-1)
        return val, G.reshape(G.shape[:-2] + (-1,))

    def features(self, X, grad: bool = False):
        """Explicit features of a separable kernel, ``sigma_k h(x * gamma_k) Psi_k(x)``.

        Returns ``Phi`` of shape ``(n, K, 2)`` with ``k(x, y) = sum Phi(x) * Phi(y)``,
        and with ``grad`` also ``dPhi`` of shape ``(n, K, 1 + 3d, 2)``: derivatives
        of each component's features with respect to that component's packed parameters.
        """
        if not self.separable:
            raise InputError("explicit features exist only for the separable star variant")
        X = _as_points(X, self.d)
        u = X[:, None, :] * self.gamma
        r, u2r = _scaled_radius(u)
        sig = np.sqrt(self.sigma2)
        env = sig * self.base.value(r)  # (n, K)
        p1 = TWO_PI * X @ self.omega1.T
        p2 = TWO_PI * X @ self.omega2.T
        c1, s1, c2, s2 = np.cos(p1), np.sin(p1), np.cos(p2), np.sin(p2)
        Psi = np.stack([c1 + c2, s1 + s2], axis=-1)
        Phi = env[..., None] * Psi
        if not grad:
            return Phi
        d_s2 = 0.5 * Phi[:, :, None, :]
        d_gam = (sig * self.base.deriv(r))[..., None, None] * u2r[..., None] * Psi[:, :, None, :]
        tx = TWO_PI * X[:, None, :, None]  # (n, 1, d, 1)
        d_w1 = env[..., None, None] * tx * np.stack([-s1, c1], axis=-1)[:, :, None, :]
        d_w2 = env[..., None, None] * tx * np.stack([-s2, c2], axis=-1)[:, :, None, :]
        return Phi, np.concatenate([d_s2, d_gam, d_w1, d_w2], axis=2)

    def free_params(self) -> np.ndarray:
        blocks = np.concatenate(
            [np.log(self.sigma2)[:, None], _log_floor(self.gamma), self.omega1, self.omega2], axis=1
        )
        return blocks.ravel()

    def with_params(self, v) -> "NonstationaryGSK":
        K, d = self.n_components, self.d
        v = np.asarray(v, dtype=float).reshape(K, 1 + 3 * d)
        return NonstationaryGSK(
            self.star,
            np.exp(v[:, 0]),
            np.exp(v[:, 1 : 1 + d]),
            v[:, 1 + d : 1 + 2 * d],
            v[:, 1 + 2 * d :],
        )


def psi(X, omega1, omega2) -> np.ndarray:
    """Psi features, shape ``(n, K, 2)`` for inputs ``(n, d)`` and frequencies ``(K, d)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    p1 = TWO_PI * X @ np.asarray(omega1, dtype=float).T
    p2 = TWO_PI * X @ np.asarray(omega2, dtype=float).T
    return np.stack([np.cos(p1) + np.cos(p2), np.sin(p1) + np.sin(p2)], axis=-1)


class SparseSpectrumKernel(_Kernel):
    """``k(tau) = s2 / K * sum_k cos(2 pi omega_k . tau)`` with one shared amplitude."""

    def __init__(self, sigma2: float, omega):
        omega = np.asarray(omega, dtype=float)
        if omega.ndim == 1:
            omega = omega[:, None]
        if omega.ndim != 2 or omega.shape[0] < 1:
            raise InputError("omega must have shape (K, d) with K >= 1")
        if not (np.isfinite(sigma2) and sigma2 > 0):
            raise InputError("sigma2 must be strictly positive")
        self.sigma2 = float(sigma2)
        self.omega = _frozen(omega)
        self.d = omega.shape[1]

    @property
    def n_components(self) -> int:
        return self.omega.shape[0]

    def __repr__(self):
        return f"SparseSpectrumKernel(K={self.n_components}, d={self.d})"

    def at(self, tau) -> float:
        tau = _as_vector(tau, self.d, "tau")
        return float(self._evaluate(tau, np.zeros_like(tau), grad=False)[0])

    def _evaluate(self, A, B, grad):
        tau = A - B
        phase = TWO_PI * np.einsum("...d,kd->...k", tau, self.omega)
        w = self.sigma2 / self.n_components
        val = w * np.cos(phase).sum(axis=-1)
        if not grad:
            return val, None
        g_om = (-w * np.sin(phase))[..., None] * TWO_PI * tau[..., None, :]
        g_om = g_om.reshape(g_om.shape[:-2] + (-1,))
        return val, np.concatenate([val[..., None], g_om], axis=-1)

    def free_params(self) -> np.ndarray:
        return np.concatenate([[np.log(self.sigma2)], self.omega.ravel()])

    def with_params(self, v) -> "SparseSpectrumKernel":
        v = np.asarray(v, dtype=float)
        return SparseSpectrumKernel(np.exp(v[0]), v[1:].reshape(self.omega.shape))

    def as_gsk(self, base="se") -> StationaryGSK:
        """Equivalent stationary GSK with ``gamma = 0`` and equal amplitudes."""
        K = self.n_components
        return StationaryGSK(
            base, np.full(K, self.sigma2 / K), np.zeros_like(self.omega), np.abs(self.omega)
        )


Kernel = StationaryGSK | NonstationaryGSK | SparseSpectrumKernel


def eval_stationary(k: StationaryGSK, tau) -> float:
    return k.at(tau)


def eval_nonstationary(k: NonstationaryGSK, x, y, method: str = "psi") -> float:
    return k.at(x, y, method=method)


def grad_stationary(k: StationaryGSK, tau) -> np.ndarray:
    """Gradient of ``k(tau)`` with respect to the packed (log-space) kernel parameters."""
    tau = _as_vector(tau, k.d, "tau")
    return k._evaluate(tau, np.zeros_like(tau), grad=True)[1]


def grad_nonstationary(k: NonstationaryGSK, x, y) -> np.ndarray:
    x = _as_vector(x, k.d, "x")
    y = _as_vector(y, k.d, "y")
    return k._evaluate(x, y, grad=True)[1]


def pack(kernel: Kernel, noise_variance: float | None = None) -> np.ndarray:
    """Flatten a kernel (and optionally a noise variance) into a hyperparameter vector."""
    v = kernel.free_params()
    if noise_variance is None:
        return v
    if not noise_variance >= 0:
        raise InputError("noise_variance must be nonnegative")
    return np.append(v, np.log(max(noise_variance, FLOOR)))


def unpack(v, template: Kernel):
    """Inverse of :func:`pack`. Returns ``(kernel, noise_variance)``.

    The vector length decides whether a noise variance is present; it is
    ``None`` otherwise.
    """
    v = np.asarray(v, dtype=float)
    P = template.n_params
    if v.ndim != 1 or v.size not in (P, P + 1):
        raise InputError(f"hyperparameter vector has length {v.size}; template expects {P} or {P + 1}")
    if not np.all(np.isfinite(v)):
        raise InputError("hyperparameter vector contains non-finite values")
    kernel = template.with_params(v[:P])
    noise = float(np.exp(v[P])) if v.size == P + 1 else None
    return kernel, noise


def kernel_to_dict(kernel: Kernel, noise_variance: float | None = None) -> dict[str, Any]:
    """Serialize to the kernel JSON schema.

    Sparse spectrum kernels are written as their equivalent ``gamma = 0``
    stationary kernel.
    """
    if isinstance(kernel, SparseSpectrumKernel):
        kernel = kernel.as_gsk()
    out: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if isinstance(kernel, StationaryGSK):
        out["type"] = "stationary"
        out["base"] = kernel.base.kind
        comps = [
            {"sigma2": float(s), "gamma": g.tolist(), "omega": w.tolist()}
            for s, g, w in kernel.components
        ]
    else:
        out["type"] = "nonstationary"
        out["base"] = kernel.base.kind
        out["star"] = kernel.star.variant
        comps = [
            {"sigma2": float(s), "gamma": g.tolist(), "omega1": w1.tolist(), "omega2": w2.tolist()}
            for s, g, w1, w2 in kernel.components
        ]
    out["components"] = comps
    out["noise_variance"] = 0.0 if noise_variance is None else float(noise_variance)
    return out


def kernel_from_dict(cfg: dict[str, Any]):
    """Parse the kernel JSON schema. Returns ``(kernel, noise_variance)``."""
    if not isinstance(cfg, dict):
        raise InputError("kernel configuration must be a JSON object")
    try:
        ktype = cfg["type"]
        base = BaseKernel(cfg["base"])
        comps = cfg["components"]
    except KeyError as exc:
        raise InputError(f"kernel configuration is missing field {exc.args[0]!r}") from None
    if not isinstance(comps, list) or not comps:
        raise InputError("'components' must be a nonempty array")
    noise = cfg.get("noise_variance", 0.0)
    if isinstance(noise, bool) or not isinstance(noise, (int, float)) or not noise >= 0:
        raise InputError("noise_variance must be a number >= 0")

    def column(name):
        try:
            values = [c[name] for c in comps]
        except (KeyError, TypeError):
            raise InputError(f"every component needs a {name!r} field") from None
        try:
            return np.asarray(values, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"component field {name!r} must hold numbers (arrays of equal length d)") from None

    sigma2 = column("sigma2")
    gamma = column("gamma")
    if gamma.ndim != 2:
        raise InputError("'gamma' entries must be arrays of equal length d")
    if ktype == "stationary":
        return StationaryGSK(base, sigma2, gamma, column("omega")), float(noise)
    if ktype == "nonstationary":
        star = StarKernel(cfg.get("star", "separable"), base)
        return NonstationaryGSK(star, sigma2, gamma, column("omega1"), column("omega2")), float(noise)
    raise InputError(f"unknown kernel type {ktype!r}; expected 'stationary' or 'nonstationary'")


FAMILIES = {
    "s-se": ("stationary", "se"),
    "s-ma12": ("stationary", "matern12"),
    "s-ma32": ("stationary", "matern32"),
    "s-ma52": ("stationary", "matern52"),
    "ss": ("sparse", None),
    "ns-se": ("separable", "se"),
    "ns-ma12": ("separable", "matern12"),
    "ns-ma32": ("separable", "matern32"),
    "ns-ma52": ("separable", "matern52"),
}


def template_for(family: str, n_components: int, d: int = 1) -> Kernel:
    """Kernel with unit parameters for a named family.

    ``s-*`` are stationary GSKs, ``ss`` the shared-amplitude sparse spectrum
    kernel and ``ns-*`` separable nonstationary GSKs; the suffix names the base.
    """
    try:
        kind, base = FAMILIES[family]
    except KeyError:
        raise InputError(f"unknown kernel family {family!r}; expected one of {sorted(FAMILIES)}") from None
    if n_components < 1 or d < 1:
        raise InputError("n_components and d must be >= 1")
    ones = np.ones((n_components, d))
    if kind == "stationary":
        return StationaryGSK(base, np.ones(n_components), ones, ones)
    if kind == "sparse":
        return SparseSpectrumKernel(1.0, ones)
    return NonstationaryGSK(StarKernel("separable", base), np.ones(n_components), ones, ones, ones)
