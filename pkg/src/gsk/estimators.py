"""scikit-learn compatible wrappers around the GP, basis and RFF routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from gsk import gp
from gsk.exceptions import InputError
from gsk.kernels import NonstationaryGSK, StationaryGSK, template_for
from gsk.optimize import OptimizerConfig, train_gp
from gsk.rff import feature_map, sample_frequencies


def _template(kernel, n_components: int, d: int):
    if isinstance(kernel, str):
        return template_for(kernel, n_components, d)
    if kernel.d != d:
        raise InputError(f"kernel has input dimension {kernel.d} but X has {d} columns")
    return kernel


class GSKRegressor(RegressorMixin, BaseEstimator):
    """Exact GP regression with a spectral kernel.

    ``kernel`` is a family name (``"s-ma32"``, ``"ns-se"``, ...) or a kernel
    object. With ``optimize=True`` its hyperparameters and the noise variance
    are learned by maximizing the marginal likelihood; a kernel object then
    seeds the first restart.
    """

    def __init__(
        self,
        kernel="s-ma32",
        n_components: int = 2,
        noise_variance: float | None = None,
        optimize: bool = True,
        n_restarts: int = 5,
        max_iter: int = 2000,
        random_state: int = 0,
        center: bool = False,
        n_jobs: int | None = None,
    ):
        self.kernel = kernel
        self.n_components = n_components
        self.noise_variance = noise_variance
        self.optimize = optimize
        self.n_restarts = n_restarts
        self.max_iter = max_iter
        self.random_state = random_state
        self.center = center
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        template = _template(self.kernel, self.n_components, X.shape[1])
        self.y_offset_ = float(np.mean(y)) if self.center else 0.0
        yc = y - self.y_offset_
        if self.optimize:
            config = OptimizerConfig(
                max_iter=self.max_iter, restarts=self.n_restarts, seed=self.random_state, n_jobs=self.n_jobs
            )
            first = None if isinstance(self.kernel, str) else template
            self.fit_report_ = train_gp(
                X, yc, template, config,
                fit_noise=self.noise_variance is None,
                noise_variance=self.noise_variance,
                initial_kernel=first,
            )
            self.kernel_ = self.fit_report_.kernel
            self.noise_variance_ = float(self.fit_report_.noise_variance)
        else:
            if isinstance(self.kernel, str):
                raise InputError("optimize=False needs a kernel object, not a family name")
            self.kernel_ = template
            self.noise_variance_ = 0.0 if self.noise_variance is None else float(self.noise_variance)
        self.model_ = gp.fit_gp(X, yc, self.kernel_, self.noise_variance_)
        self.log_marginal_likelihood_ = self.model_.log_marginal_likelihood
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, return_std: bool = False, latent: bool = False):
        check_is_fitted(self, "model_")
        X = check_array(X)
        mean, var = gp.predict(self.model_, X, latent=latent)
        mean = mean + self.y_offset_
        return (mean, np.sqrt(var)) if return_std else mean


class SeparableBasisRegressor(RegressorMixin, BaseEstimator):
    """Weight-space inference for a fixed separable nonstationary kernel.

    Cost is linear in the number of samples; predictions equal those of the
    exact GP with the same kernel and noise.
    """

    def __init__(self, kernel: NonstationaryGSK | None = None, noise_variance: float = 0.1):
        self.kernel = kernel
        self.noise_variance = noise_variance

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.kernel is None:
            raise InputError("SeparableBasisRegressor needs a kernel")
        self.model_ = gp.fit_basis(X, y, self.kernel, self.noise_variance)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, return_std: bool = False, latent: bool = False):
        check_is_fitted(self, "model_")
        mean, var = gp.predict_basis(self.model_, check_array(X), latent=latent)
        return (mean, np.sqrt(var)) if return_std else mean


class SpectralFourierFeatures(TransformerMixin, BaseEstimator):
    """Random Fourier features of a stationary spectral kernel.

    ``transform(X) @ transform(Y).T`` is an unbiased estimate of ``kernel(X, Y)``.
    """

    def __init__(self, kernel: StationaryGSK | None = None, n_features: int = 100, random_state=None):
        self.kernel = kernel
        self.n_features = n_features
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        if self.kernel is None:
            raise InputError("SpectralFourierFeatures needs a kernel")
        if self.kernel.d != X.shape[1]:
            raise InputError(f"kernel has input dimension {self.kernel.d} but X has {X.shape[1]} columns")
        self.basis_ = sample_frequencies(self.kernel, self.n_features, self.random_state)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        return feature_map(self.basis_, check_array(X))
