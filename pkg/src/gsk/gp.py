"""Exact Gaussian-process regression and finite-basis inference.

The GP is zero-mean throughout. Function-space inference factorizes
``K + noise * I`` by Cholesky; weight-space inference for separable
nonstationary kernels works with the ``2K`` explicit features instead and
costs ``O(n K^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from gsk.exceptions import InputError, NumericalError
from gsk.kernels import NonstationaryGSK, _as_points

LOG_2PI = np.log(2.0 * np.pi)
JITTER_LADDER = tuple(10.0**e for e in range(-10, -3))  # relative to the mean diagonal


def check_dataset(X, y, d: int):
    X = _as_points(X, d)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise InputError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InputError("dataset contains non-finite values")
    return X, y


def gram(kernel, X, X2=None) -> np.ndarray:
    return kernel(X, X2)


def cholesky_jitter(K: np.ndarray):
    """Lower Cholesky factor of ``K``, retrying with growing diagonal jitter.

    Returns ``(L, jitter)`` where ``jitter`` is the absolute amount added.
    """
    n = K.shape[0]
    if n == 0:
        return np.zeros((0, 0)), 0.0
    if not np.all(np.isfinite(K)):
        raise NumericalError("covariance matrix contains non-finite entries")
    scale = float(np.mean(np.diag(K)))
    if not scale > 0:
        scale = 1.0
    for jitter in (0.0,) + tuple(rel * scale for rel in JITTER_LADDER):
        try:
            L = linalg.cholesky(K + jitter * np.eye(n), lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
        return L, jitter
    raise NumericalError(
        f"Cholesky factorization failed for a {n}x{n} matrix even with jitter "
        f"{JITTER_LADDER[-1]:.0e} x mean diagonal ({scale:.3g})"
    )


def _factorize(X, y, kernel, noise_variance):
    K = kernel(X) + noise_variance * np.eye(X.shape[0])
    L, jitter = cholesky_jitter(K)
    alpha = linalg.cho_solve((L, True), y, check_finite=False)
    return L, alpha, jitter


def log_marginal_likelihood(X, y, kernel, noise_variance: float) -> float:
    X, y = check_dataset(X, y, kernel.d)
    L, alpha, _ = _factorize(X, y, kernel, noise_variance)
    return float(-0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * y.size * LOG_2PI)


def mll_value_and_grad(X, y, kernel, noise_variance: float, fit_noise: bool = True):
    """Log marginal likelihood and its gradient in packed (log-space) coordinates.

    The gradient follows the layout of :func:`gsk.kernels.pack`; the last entry is
    the derivative with respect to ``log noise_variance`` when ``fit_noise``.
    """
    X, y = check_dataset(X, y, kernel.d)
    n = y.size
    L, alpha, _ = _factorize(X, y, kernel, noise_variance)
    value = float(-0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * LOG_2PI)
    K_inv = linalg.cho_solve((L, True), np.eye(n), check_finite=False)
    W = np.outer(alpha, alpha) - K_inv
    grad = 0.5 * np.einsum("ij,ijp->p", W, kernel.gradient(X))
    if fit_noise:
        grad = np.append(grad, 0.5 * noise_variance * np.trace(W))
    return value, grad


def mll_gradient(X, y, kernel, noise_variance: float, fit_noise: bool = True) -> np.ndarray:
    return mll_value_and_grad(X, y, kernel, noise_variance, fit_noise)[1]


@dataclass(frozen=True)
class GPModel:
    kernel: object
    noise_variance: float
    X: np.ndarray
    y: np.ndarray
    L: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0

    @property
    def log_marginal_likelihood(self) -> float:
        n = self.y.size
        return float(-0.5 * self.y @ self.alpha - np.log(np.diag(self.L)).sum() - 0.5 * n * LOG_2PI)


def fit_gp(X, y, kernel, noise_variance: float) -> GPModel:
    """Factorize the training covariance. An empty dataset yields the prior."""
    if noise_variance < 0:
        raise InputError("noise_variance must be nonnegative")
    X, y = check_dataset(X, y, kernel.d)
    L, alpha, jitter = _factorize(X, y, kernel, noise_variance)
    return GPModel(kernel, float(noise_variance), X, y, L, alpha, jitter)


def predict(model: GPModel, Xstar, latent: bool = False):
    """Posterior predictive mean and variance at ``Xstar``.

    The variance includes the observation noise unless ``latent`` is set.
    """
    Xstar = _as_points(Xstar, model.kernel.d, "Xstar")
    prior_var = model.kernel.diag(Xstar)
    if model.y.size == 0:
        mean = np.zeros(Xstar.shape[0])
        var = prior_var
    else:
        Ks = model.kernel(model.X, Xstar)
        mean = Ks.T @ model.alpha
        v = linalg.solve_triangular(model.L, Ks, lower=True, check_finite=False)
        var = prior_var - np.sum(v**2, axis=0)
    if not latent:
        var = var + model.noise_variance
    return mean, np.maximum(var, 0.0)


def basis_features(kernel: NonstationaryGSK, X) -> np.ndarray:
    """Features ``sigma_k h(x * gamma_k) Psi_k(x)`` stacked over components, shape ``(n, 2K)``.

    Their inner products reproduce the separable kernel exactly.
    """
    if not (isinstance(kernel, NonstationaryGSK) and kernel.separable):
        raise InputError("finite-basis inference requires a separable nonstationary kernel")
    X = _as_points(X, kernel.d)
    return kernel.features(X).reshape(X.shape[0], 2 * kernel.n_components)


@dataclass(frozen=True)
class BasisModel:
    """Bayesian linear regression on the kernel's explicit features (unit prior on weights)."""

    kernel: NonstationaryGSK
    noise_variance: float
    weight_mean: np.ndarray
    precision_chol: np.ndarray

    @property
    def n_features(self) -> int:
        return self.weight_mean.size


def fit_basis(X, y, kernel: NonstationaryGSK, noise_variance: float) -> BasisModel:
    if not noise_variance > 0:
        raise InputError("finite-basis inference requires noise_variance > 0")
    Phi = basis_features(kernel, X)
    X, y = check_dataset(X, y, kernel.d)
    A = np.eye(Phi.shape[1]) + Phi.T @ Phi / noise_variance
    L = linalg.cholesky(A, lower=True)
    w = linalg.cho_solve((L, True), Phi.T @ y / noise_variance)
    return BasisModel(kernel, float(noise_variance), w, L)


def predict_basis(model: BasisModel, Xstar, latent: bool = False):
    phi = basis_features(model.kernel, Xstar)
    mean = phi @ model.weight_mean
    v = linalg.solve_triangular(model.precision_chol, phi.T, lower=True)
    var = np.sum(v**2, axis=0)
    if not latent:
        var = var + model.noise_variance
    return mean, var
