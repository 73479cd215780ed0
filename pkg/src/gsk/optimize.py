"""Multi-restart hyperparameter optimization in log-space.

Two objectives are provided: the negative log marginal likelihood of a GP
(:func:`train_gp`) and the sum of squared errors between a candidate kernel
and a target covariance on a set of input pairs (:class:`SSEObjective`).
Both are minimized with L-BFGS-B from several random initializations; every
restart draws from its own child seed so results do not depend on execution
order or on how many restarts follow it.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize as sopt

from gsk.exceptions import InputError, NumericalError
from gsk.gp import check_dataset, mll_value_and_grad
from gsk.kernels import (
    NonstationaryGSK,
    SparseSpectrumKernel,
    StationaryGSK,
    pack,
    unpack,
)

logger = logging.getLogger(__name__)

MAX_INIT_TRIES = 100
LAG_DECIMALS = 12


def default_threads() -> int:
    env = os.environ.get("GSK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"GSK_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 2000
    gtol: float = 1e-6
    restarts: int = 5
    seed: int = 0
    amplitude_range: tuple[float, float] = (0.1, 1.0)
    inverse_scale_range: tuple[float, float] = (0.1, 2.0)
    frequency_range: tuple[float, float] = (0.0, 3.0)
    noise_fraction: float = 0.1
    n_jobs: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if not self.gtol > 0:
            raise InputError("gtol must be > 0")
        if self.max_iter < 0:
            raise InputError("max_iter must be >= 0")


@dataclass
class FitReport:
    """Outcome of a multi-restart minimization.

    ``traces[i]`` holds the objective after every iteration of restart ``i``
    (starting with its initial value). ``metric`` is the task-level score
    (log marginal likelihood or normalized RMSE) when one applies.
    """

    x: np.ndarray
    fun: float
    best_restart: int
    initial_values: list[float]
    final_values: list[float]
    traces: list[list[float]]
    n_iterations: list[int]
    seed: int
    kernel: object = None
    noise_variance: float | None = None
    metric_name: str | None = None
    metric: float | None = None
    wall_time: float = field(default=0.0, compare=False)

    def __eq__(self, other):
        if not isinstance(other, FitReport):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and self.fun == other.fun
            and self.best_restart == other.best_restart
            and self.initial_values == other.initial_values
            and self.final_values == other.final_values
            and self.traces == other.traces
            and self.n_iterations == other.n_iterations
            and self.seed == other.seed
            and self.noise_variance == other.noise_variance
            and self.metric == other.metric
        )


def _safe(fun):
    def wrapped(x):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                f, g = fun(x)
        except (NumericalError, InputError, FloatingPointError):
            return np.inf, np.zeros_like(x)
        f = float(f)
        g = np.asarray(g, dtype=float)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            return np.inf, np.zeros_like(x)
        return f, g

    return wrapped


def _initial_point(fun, x0, rng):
    if not callable(x0):
        x = np.asarray(x0, dtype=float).copy()
        f, _ = fun(x)
        if not np.isfinite(f):
            raise NumericalError("objective is not finite at the initial point")
        return x, f
    for _ in range(MAX_INIT_TRIES):
        x = np.asarray(x0(rng), dtype=float)
        f, _ = fun(x)
        if np.isfinite(f):
            return x, f
    raise NumericalError(f"objective was not finite at {MAX_INIT_TRIES} sampled initial points")


def _run_restart(fun, x0, config: OptimizerConfig, seed_seq):
    rng = np.random.default_rng(seed_seq)
    x_init, f_init = _initial_point(fun, x0, rng)
    trace = [f_init]
    if config.max_iter == 0:
        # scipy still takes a step with maxiter=0
        return x_init, f_init, f_init, trace, 0

    def record(intermediate_result):
        trace.append(float(intermediate_result.fun))

    res = sopt.minimize(
        fun,
        x_init,
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": config.max_iter, "gtol": config.gtol, "ftol": 0.0, "maxls": 50},
    )
    x, f = np.asarray(res.x, dtype=float), float(res.fun)
    if not f <= f_init:
        x, f = x_init, f_init
    return x, f, f_init, trace, int(res.nit)


def minimize(fun: Callable, x0, config: OptimizerConfig = OptimizerConfig(), first=None) -> FitReport:
    """Minimize ``fun(x) -> (value, gradient)`` over ``config.restarts`` restarts.

    ``x0`` is either a fixed starting vector or a callable ``x0(rng)`` drawing a
    random one. If ``first`` is given, restart 0 starts there instead. The best
    restart wins; ties go to the lowest restart index.
    """
    start = time.perf_counter()
    fun = _safe(fun)
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    starts = [x0] * config.restarts
    if first is not None:
        starts[0] = np.asarray(first, dtype=float)
    n_jobs = config.n_jobs or default_threads()
    if n_jobs > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=min(n_jobs, config.restarts)) as pool:
            results = list(pool.map(lambda a: _run_restart(fun, a[0], config, a[1]), zip(starts, children)))
    else:
        results = [_run_restart(fun, s0, config, s) for s0, s in zip(starts, children)]
    finals = [r[1] for r in results]
    best = int(np.argmin(finals))
    for i, r in enumerate(results):
        logger.debug("restart %d: %.6g -> %.6g in %d iterations", i, r[2], r[1], r[4])
    return FitReport(
        x=results[best][0],
        fun=finals[best],
        best_restart=best,
        initial_values=[r[2] for r in results],
        final_values=finals,
        traces=[r[3] for r in results],
        n_iterations=[r[4] for r in results],
        seed=config.seed,
        wall_time=time.perf_counter() - start,
    )


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def sample_kernel(template, rng: np.random.Generator, config: OptimizerConfig, amplitude_scale: float = 1.0):
    """Random kernel with the structure of ``template`` drawn from the config's init ranges."""
    K, d = template.n_components, template.d
    amp = amplitude_scale * _log_uniform(rng, *config.amplitude_range, K)
    gam = _log_uniform(rng, *config.inverse_scale_range, (K, d))
    lo, hi = config.frequency_range
    if isinstance(template, StationaryGSK):
        return StationaryGSK(template.base, amp, gam, rng.uniform(lo, hi, (K, d)))
    if isinstance(template, NonstationaryGSK):
        w1 = rng.uniform(lo, hi, (K, d))
        w2 = rng.uniform(lo, hi, (K, d))
        return NonstationaryGSK(template.star, amp, gam, w1, w2)
    if isinstance(template, SparseSpectrumKernel):
        return SparseSpectrumKernel(amp.sum(), rng.uniform(lo, hi, (K, d)))
    raise InputError(f"unsupported kernel template {template!r}")


def initial_sampler(template, config: OptimizerConfig, amplitude_scale: float = 1.0, noise_variance: float | None = None):
    def draw(rng):
        return pack(sample_kernel(template, rng, config, amplitude_scale), noise_variance)

    return draw


def train_gp(
    X,
    y,
    template,
    config: OptimizerConfig = OptimizerConfig(),
    fit_noise: bool = True,
    noise_variance: float | None = None,
    initial_kernel=None,
) -> FitReport:
    """Maximize the log marginal likelihood over kernel hyperparameters and noise.

    With ``fit_noise=False`` the noise variance is held at ``noise_variance``.
    ``initial_kernel`` (same structure as ``template``) seeds restart 0.
    """
    X, y = check_dataset(X, y, template.d)
    y_var = float(np.var(y)) if y.size > 1 else float(np.mean(y**2))
    if noise_variance is None:
        noise_variance = config.noise_fraction * y_var if y_var > 0 else config.noise_fraction
    fixed_noise = noise_variance

    def objective(v):
        kernel, noise = unpack(v, template)
        value, grad = mll_value_and_grad(X, y, kernel, fixed_noise if noise is None else noise, fit_noise)
        return -value, -grad

    draw = initial_sampler(template, config, noise_variance=noise_variance if fit_noise else None)
    first = None
    if initial_kernel is not None:
        first = pack(initial_kernel, noise_variance if fit_noise else None)
    report = minimize(objective, draw, config, first=first)
    kernel, noise = unpack(report.x, template)
    report.kernel = kernel
    report.noise_variance = fixed_noise if noise is None else noise
    report.metric_name = "log_marginal_likelihood"
    report.metric = -report.fun
    return report


class SSEObjective:
    """Sum of squared errors between a candidate kernel and fixed target values.

    ``X1`` and ``X2`` enumerate the evaluation pairs row by row. Objectives built
    with :meth:`on_grid` cover every ordered pair of a point set; for separable
    nonstationary templates they are evaluated through the explicit features,
    and for stationary templates once per distinct lag.
    """

    def __init__(self, target_values, X1, X2, template):
        self.target_values = np.asarray(target_values, dtype=float).reshape(-1)
        self.X1 = np.asarray(X1, dtype=float)
        self.X2 = np.asarray(X2, dtype=float)
        if self.target_values.size == 0:
            raise InputError("evaluation grid is empty")
        if self.X1.shape[0] != self.target_values.size or self.X2.shape != self.X1.shape:
            raise InputError("grid pairs and target values disagree in length")
        if not np.all(np.isfinite(self.target_values)):
            raise InputError("target values must be finite on the grid")
        self.template = template
        self.points = None
        self._lags = None

    @classmethod
    def from_target(cls, target, X1, X2, template) -> "SSEObjective":
        values = target.pairs(X1, X2) if hasattr(target, "pairs") else target(X1, X2)
        return cls(values, X1, X2, template)

    @classmethod
    def on_grid(cls, target, points, template) -> "SSEObjective":
        """All ``n**2`` ordered pairs of ``points`` (shape ``(n, d)`` or ``(n,)``)."""
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        n = P.shape[0]
        X1 = np.repeat(P, n, axis=0)
        X2 = np.tile(P, (n, 1))
        obj = cls.from_target(target, X1, X2, template)
        obj.points = P
        if isinstance(template, (StationaryGSK, SparseSpectrumKernel)):
            obj._group_lags()
        return obj

    def _group_lags(self):
        # a stationary candidate takes one value per distinct lag x1 - x2, so the SSE
        # splits into n_g (k_g - mean_g)^2 per lag plus a constant within-lag spread
        D = self.X1 - self.X2
        _, first, inverse, counts = np.unique(
            np.round(D, LAG_DECIMALS), axis=0, return_index=True, return_inverse=True, return_counts=True
        )
        inverse = inverse.reshape(-1)
        means = np.bincount(inverse, weights=self.target_values) / counts
        spread = self.target_values - means[inverse]
        self._lags = (D[first], counts.astype(float), means, float(spread @ spread))

    def _feature_path(self) -> bool:
        t = self.template
        return self.points is not None and isinstance(t, NonstationaryGSK) and t.separable

    def value_and_grad(self, v):
        v = np.asarray(v, dtype=float)
        if v.size != self.template.n_params:
            raise InputError(f"expected {self.template.n_params} parameters, got {v.size}")
        kernel = self.template.with_params(v)
        if self._feature_path():
            n = self.points.shape[0]
            Phi, dPhi = kernel.features(self.points, grad=True)
            F = Phi.reshape(n, -1)
            R = F @ F.T - self.target_values.reshape(n, n)
            RPhi = (R @ F).reshape(Phi.shape)
            # R is not symmetric in general, so both sides of dK = dPhi Phi^T + Phi dPhi^T are kept
            RtPhi = (R.T @ F).reshape(Phi.shape)
            grad = 2.0 * np.einsum("nkpc,nkc->kp", dPhi, RPhi + RtPhi)
            return float(np.sum(R**2)), grad.reshape(-1)
        if self._lags is not None:
            lags, counts, means, spread = self._lags
            values, G = kernel.pairs_with_gradient(lags, np.zeros_like(lags))
            resid = values - means
            return float(counts @ resid**2 + spread), 2.0 * G.T @ (counts * resid)
        values, G = kernel.pairs_with_gradient(self.X1, self.X2)
        resid = values - self.target_values
        return float(resid @ resid), 2.0 * G.T @ resid

    __call__ = value_and_grad


def sse_value_and_grad(objective: SSEObjective, v):
    return objective.value_and_grad(v)


def fit_to_target(objective: SSEObjective, config: OptimizerConfig, amplitude_scale: float = 1.0) -> FitReport:
    """Fit ``objective.template`` to the target values by least squares."""
    report = minimize(objective, initial_sampler(objective.template, config, amplitude_scale), config)
    report.kernel = objective.template.with_params(report.x)
    report.metric_name = "sse"
    report.metric = report.fun
    return report
