import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gsk.estimators import GSKRegressor, SeparableBasisRegressor, SpectralFourierFeatures
from gsk.exceptions import InputError
from gsk.gp import fit_gp, predict
from gsk.kernels import NonstationaryGSK, StarKernel, StationaryGSK


@pytest.fixture
def data():
    rng = np.random.default_rng(5)
    X = rng.uniform(0, 4, (30, 1))
    y = np.sin(2 * X[:, 0]) + 0.1 * rng.normal(size=30) + 3.0
    return X, y


def test_get_params_and_clone():
    est = GSKRegressor(kernel="s-se", n_components=3, n_restarts=2)
    params = est.get_params()
    assert params["kernel"] == "s-se" and params["n_components"] == 3
    c = clone(est)
    assert c.get_params() == params


def test_fit_predict_family(data):
    X, y = data
    est = GSKRegressor(kernel="s-ma32", n_components=1, n_restarts=2, center=True).fit(X, y)
    mean, std = est.predict(X, return_std=True)
    assert mean.shape == std.shape == (30,)
    assert np.sqrt(np.mean((mean - y) ** 2)) < 0.3
    assert est.score(X, y) > 0.8
    assert np.isfinite(est.log_marginal_likelihood_)


def test_fixed_kernel_matches_gp(data):
    X, y = data
    k = StationaryGSK("se", [1.0], [[0.5]], [[0.3]])
    est = GSKRegressor(kernel=k, optimize=False, noise_variance=0.1).fit(X, y)
    ref, _ = predict(fit_gp(X, y, k, 0.1), X[:5])
    np.testing.assert_allclose(est.predict(X[:5]), ref, atol=1e-12)


def test_optimize_false_needs_kernel_object(data):
    with pytest.raises(InputError):
        GSKRegressor(kernel="s-se", optimize=False).fit(*data)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        GSKRegressor().predict(np.zeros((1, 1)))


def test_basis_regressor_matches_exact(data):
    X, y = data
    k = NonstationaryGSK(StarKernel("separable", "matern32"), [1.0, 0.5], [[0.3], [0.6]], [[0.2], [0.5]], [[0.1], [0.9]])
    est = SeparableBasisRegressor(kernel=k, noise_variance=0.2).fit(X, y)
    m, s = est.predict(X[:4], return_std=True)
    rm, rv = predict(fit_gp(X, y, k, 0.2), X[:4])
    np.testing.assert_allclose(m, rm, atol=1e-8)
    np.testing.assert_allclose(s**2, rv, atol=1e-8)


def test_fourier_features_transform():
    k = StationaryGSK("matern32", [1.0], [[1.0]], [[0.2]])
    X = np.linspace(0, 1, 6)[:, None]
    tr = SpectralFourierFeatures(kernel=k, n_features=20000, random_state=0)
    F = tr.fit_transform(X)
    assert F.shape == (6, 40000)
    np.testing.assert_allclose(F @ F.T, k(X), atol=0.05)
    with pytest.raises(InputError):
        SpectralFourierFeatures(kernel=k).fit(np.zeros((2, 2)))
