import numpy as np
import pytest

from conftest import central_difference, random_nonstationary
from gsk.exceptions import InputError
from gsk.gp import log_marginal_likelihood
from gsk.kernels import NonstationaryGSK, StationaryGSK, pack, template_for
from gsk.optimize import (
    OptimizerConfig,
    SSEObjective,
    default_threads,
    fit_to_target,
    minimize,
    sse_value_and_grad,
    train_gp,
)
from gsk.targets import EvalGrid, IFBMKernel

ONE = OptimizerConfig(restarts=1)


def test_convex_1d():
    rep = minimize(lambda x: ((x[0] - 3) ** 2, np.array([2 * (x[0] - 3)])), np.zeros(1), ONE)
    assert abs(rep.x[0] - 3) < 1e-6


def test_stationary_start_terminates():
    rep = minimize(lambda x: (x[0] ** 4, np.array([4 * x[0] ** 3])), np.zeros(1), ONE)
    assert rep.x[0] == 0.0
    assert rep.n_iterations[0] == 0


def test_quadratic_2d():
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    b = np.array([1.0, -2.0])
    x_star = np.linalg.solve(A, b)
    rep = minimize(lambda x: (0.5 * x @ A @ x - b @ x, A @ x - b), lambda rng: rng.normal(size=2), OptimizerConfig(restarts=3))
    np.testing.assert_allclose(rep.x, x_star, atol=1e-6)


def test_traces_monotone_and_best_restart():
    fun = lambda x: (np.sum(np.cos(3 * x)) + 0.1 * x @ x, -3 * np.sin(3 * x) + 0.2 * x)
    rep = minimize(fun, lambda rng: rng.uniform(-4, 4, 2), OptimizerConfig(restarts=6, seed=3))
    assert rep.fun == min(rep.final_values)
    assert rep.best_restart == int(np.argmin(rep.final_values))
    for trace, init, final in zip(rep.traces, rep.initial_values, rep.final_values):
        assert trace[0] == init
        assert final <= init
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_seed_streams_are_prefix_stable():
    fun = lambda x: (np.sum(np.cos(3 * x)) + 0.1 * x @ x, -3 * np.sin(3 * x) + 0.2 * x)
    draw = lambda rng: rng.uniform(-4, 4, 2)
    a = minimize(fun, draw, OptimizerConfig(restarts=3, seed=7))
    b = minimize(fun, draw, OptimizerConfig(restarts=6, seed=7))
    assert a.initial_values == b.initial_values[:3]
    assert a.final_values == b.final_values[:3]


def test_thread_count_does_not_change_result():
    fun = lambda x: (np.sum(np.cos(3 * x)) + 0.1 * x @ x, -3 * np.sin(3 * x) + 0.2 * x)
    draw = lambda rng: rng.uniform(-4, 4, 3)
    serial = minimize(fun, draw, OptimizerConfig(restarts=5, seed=1, n_jobs=1))
    threaded = minimize(fun, draw, OptimizerConfig(restarts=5, seed=1, n_jobs=4))
    assert serial == threaded


def test_default_threads_env(monkeypatch):
    monkeypatch.setenv("GSK_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("GSK_THREADS", "many")
    with pytest.raises(InputError):
        default_threads()


def test_config_validation():
    with pytest.raises(InputError):
        OptimizerConfig(restarts=0)
    with pytest.raises(InputError):
        OptimizerConfig(gtol=0.0)


def test_failed_evaluations_are_skipped():
    def fun(x):
        if x[0] > 1:
            return np.nan, np.zeros(1)
        return (x[0] - 0.5) ** 2, np.array([2 * (x[0] - 0.5)])

    rep = minimize(fun, np.array([0.0]), ONE)
    assert rep.x[0] == pytest.approx(0.5, abs=1e-6)


# --- SSE objective ----------------------------------------------------------

def test_sse_self_fit_is_zero(rng):
    k = random_nonstationary(rng, K=2, d=1, star="separable")
    obj = SSEObjective.on_grid(k, EvalGrid().points, k)
    value, grad = sse_value_and_grad(obj, pack(k))
    assert value == pytest.approx(0.0, abs=1e-20)
    np.testing.assert_allclose(grad, 0.0, atol=1e-8)


def test_sse_single_pair():
    k = StationaryGSK("se", [2.0], [[1.0]], [[0.0]])
    target = lambda a, b: np.ones(len(a))
    obj = SSEObjective.from_target(target, np.zeros((1, 1)), np.zeros((1, 1)), k)
    assert obj(pack(k))[0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("family", ["s-se", "s-ma32", "ss", "ns-se", "ns-ma12"])
def test_sse_gradient_finite_difference(family, rng):
    grid = EvalGrid(0.05, 0.1, 8)
    template = template_for(family, 3, 1)
    obj = SSEObjective.on_grid(IFBMKernel(0.5), grid.points, template)
    v = rng.normal(size=template.n_params) * 0.5
    value, grad = obj(v)
    fd = central_difference(lambda u: obj(u)[0], v)
    np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-6 * max(1.0, np.abs(fd).max()))


def test_feature_path_matches_pair_path(rng):
    template = template_for("ns-ma32", 3, 1)
    grid = EvalGrid()
    fast = SSEObjective.on_grid(IFBMKernel(0.3), grid.points, template)
    T, S = grid.pairs()
    slow = SSEObjective.from_target(IFBMKernel(0.3), T, S, template)
    v = rng.normal(size=template.n_params)
    f1, g1 = fast(v)
    f2, g2 = slow(v)
    assert f1 == pytest.approx(f2, rel=1e-12)
    np.testing.assert_allclose(g1, g2, rtol=1e-9, atol=1e-9 * np.abs(g2).max())


def test_sse_rejects_wrong_length():
    template = template_for("s-se", 1, 1)
    obj = SSEObjective.on_grid(IFBMKernel(0.5), EvalGrid(num=3).points, template)
    with pytest.raises(InputError):
        obj(np.zeros(template.n_params + 1))


def test_fit_to_target_improves():
    template = template_for("ns-ma12", 2, 1)
    obj = SSEObjective.on_grid(IFBMKernel(0.5), EvalGrid(num=20, step=0.05).points, template)
    rep = fit_to_target(obj, OptimizerConfig(restarts=2, max_iter=200))
    assert rep.fun <= min(rep.initial_values)
    assert isinstance(rep.kernel, NonstationaryGSK)


# --- GP training ------------------------------------------------------------

def _draw(kernel, X, noise, rng):
    C = kernel(X) + noise * np.eye(len(X))
    return np.linalg.cholesky(C) @ rng.standard_normal(len(X))


def test_noise_recovered_within_factor_two():
    truth = StationaryGSK("se", [1.0], [[0.8]], [[0.3]])
    hits = 0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = rng.uniform(0, 5, (100, 1))
        y = _draw(truth, X, 0.1, rng)
        rep = train_gp(X, y, template_for("s-se", 1, 1), OptimizerConfig(restarts=3, seed=seed))
        hits += 0.05 <= rep.noise_variance <= 0.2
    assert hits >= 4


def test_zero_targets_shrink_variance():
    X = np.linspace(0, 1, 10)[:, None]
    k0 = StationaryGSK("se", [1.0], [[1.0]], [[0.5]])
    rep = train_gp(X, np.zeros(10), k0, OptimizerConfig(restarts=1, max_iter=300), noise_variance=0.5, initial_kernel=k0)
    assert rep.kernel.sigma2.sum() + rep.noise_variance < 1.5


def test_single_point_mll_not_worse_than_init():
    k0 = StationaryGSK("matern32", [1.0], [[1.0]], [[0.2]])
    X, y = np.array([[0.3]]), np.array([1.2])
    rep = train_gp(X, y, k0, OptimizerConfig(restarts=2), noise_variance=0.1, initial_kernel=k0)
    assert rep.metric >= log_marginal_likelihood(X, y, k0, 0.1)
    assert rep.metric == pytest.approx(log_marginal_likelihood(X, y, rep.kernel, rep.noise_variance), rel=1e-12)


def test_fixed_noise(rng):
    X = rng.uniform(0, 3, (15, 1))
    y = np.sin(X[:, 0])
    rep = train_gp(X, y, template_for("s-ma52", 1, 1), OptimizerConfig(restarts=2), fit_noise=False, noise_variance=0.01)
    assert rep.noise_variance == 0.01


def test_training_is_deterministic(rng):
    X = rng.uniform(0, 3, (15, 1))
    y = np.sin(3 * X[:, 0])
    cfg = OptimizerConfig(restarts=3, seed=11)
    a = train_gp(X, y, template_for("s-ma32", 2, 1), cfg)
    b = train_gp(X, y, template_for("s-ma32", 2, 1), cfg)
    assert a == b


def test_zero_iterations_returns_start():
    rep = minimize(lambda x: ((x[0] - 3) ** 2, np.array([2 * (x[0] - 3)])), np.zeros(1), OptimizerConfig(restarts=1, max_iter=0))
    assert rep.x[0] == 0.0 and rep.fun == 9.0


@pytest.mark.parametrize("family", ["s-se", "s-ma12", "ss"])
def test_lag_path_matches_pair_path(family, rng):
    template = template_for(family, 3, 1)
    grid = EvalGrid()
    fast = SSEObjective.on_grid(IFBMKernel(0.7), grid.points, template)
    assert fast._lags is not None and fast._lags[0].shape[0] == 2 * grid.num - 1
    T, S = grid.pairs()
    slow = SSEObjective.from_target(IFBMKernel(0.7), T, S, template)
    for _ in range(3):
        v = rng.normal(size=template.n_params)
        f1, g1 = fast(v)
        f2, g2 = slow(v)
        assert f1 == pytest.approx(f2, rel=1e-10)
        np.testing.assert_allclose(g1, g2, rtol=1e-8, atol=1e-8 * np.abs(g2).max())
