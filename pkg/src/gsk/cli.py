"""Command-line front end.

Exit codes: 0 success, 2 malformed input or bad flags, 3 numerical failure.
Every command is deterministic given its flags and seed.
"""

from __future__ import annotations

import functools
import logging
import math
import sys
import time
from pathlib import Path

import click
import numpy as np

from gsk import bench, gp, io
from gsk.exceptions import InputError, NumericalError
from gsk.kernels import FAMILIES, NonstationaryGSK, SparseSpectrumKernel, kernel_to_dict
from gsk.optimize import OptimizerConfig, train_gp
from gsk.rff import estimate_kernel, sample_frequencies
from gsk.targets import EvalGrid, IFBMKernel

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
MAX_PRIOR_POINTS = 2000

logger = logging.getLogger("gsk")


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except NumericalError as exc:
            click.echo(f"numerical error: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)

    return wrapper


def _finite(values):
    """JSON has no infinities; failed objective evaluations are recorded as null."""
    return [float(v) if math.isfinite(v) else None for v in values]


def _command_echo() -> list[str]:
    """The invoked subcommand with its resolved options, in a stable order."""
    ctx = click.get_current_context()
    echo = [ctx.info_name]
    for param in sorted(ctx.command.params, key=lambda p: p.opts[0]):
        value = ctx.params.get(param.name)
        if value is True:
            echo.append(param.opts[0])
        elif value is not False and value is not None:
            echo.append(f"{param.opts[0]}={value}")
    return echo


def _report_path(out: Path, suffix: str = ".report.json") -> Path:
    return out.with_name(out.stem + suffix)


@click.group()
@click.option("-v", "--verbose", count=True, help="Log optimizer progress to stderr (-vv for per-restart detail).")
def main(verbose: int):
    """Generalized spectral kernels: GP fitting, kernel approximation and RFF tools."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


@main.command("gp-fit")
@click.option("--data", type=click.Path(dir_okay=False), required=True, help="Training CSV with columns x1..xd,y.")
@click.option("--kernel", "kernel_path", type=click.Path(dir_okay=False), required=True, help="Kernel JSON (initial values).")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Fitted model JSON.")
@click.option("--restarts", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-iters", type=click.IntRange(min=0), default=2000, show_default=True)
@click.option("--center", is_flag=True, help="Subtract the training mean from y before fitting.")
@click.option("--fixed-noise", is_flag=True, help="Keep the kernel file's noise variance fixed.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="RunReport path [default: <out>.report.json].")
@_handle_errors
def gp_fit(data, kernel_path, out, restarts, seed, max_iters, center, fixed_noise, report):
    """Fit kernel hyperparameters and noise by maximizing the marginal likelihood.

    Restart 0 starts from the kernel file; the others draw random starting points.
    """
    start = time.perf_counter()
    X, y = io.read_dataset(data)
    kernel0, noise0 = io.load_kernel(kernel_path)
    X, y = gp.check_dataset(X, y, kernel0.d)
    offset = float(np.mean(y)) if center and y.size else 0.0
    yc = y - offset
    noise0 = noise0 or 0.0
    if not fixed_noise and noise0 <= 0:
        noise0 = 0.1 * float(np.var(yc)) if y.size > 1 and np.var(yc) > 0 else 0.1
    config = OptimizerConfig(max_iter=max_iters, restarts=restarts, seed=seed)
    init_mll = gp.log_marginal_likelihood(X, yc, kernel0, noise0)
    fit = train_gp(X, yc, kernel0, config, fit_noise=not fixed_noise, noise_variance=noise0, initial_kernel=kernel0)
    model = gp.fit_gp(X, yc, fit.kernel, fit.noise_variance)
    mean, _ = gp.predict(model, X)
    out = Path(out)
    io.write_json(out, io.model_to_dict(fit.kernel, fit.noise_variance, X, yc, offset))
    report_path = Path(report) if report else _report_path(out)
    io.RunReport(
        command=_command_echo(),
        config={
            "data": str(data),
            "kernel": kernel_to_dict(kernel0, noise0),
            "restarts": restarts,
            "max_iters": max_iters,
            "center": center,
            "fixed_noise": fixed_noise,
        },
        seed=seed,
        metrics={
            "initial_log_marginal_likelihood": init_mll,
            "log_marginal_likelihood": fit.metric,
            "train_rmse": float(np.sqrt(np.mean((mean - yc) ** 2))) if y.size else 0.0,
            "noise_variance": fit.noise_variance,
            "best_restart": fit.best_restart,
        },
        traces=[_finite([-v for v in t]) for t in fit.traces],
        wall_time=time.perf_counter() - start,
        outputs={"model": str(out), "report": str(report_path)},
    ).save(report_path)
    click.echo(f"log marginal likelihood {init_mll:.6g} -> {fit.metric:.6g}; model written to {out}")


@main.command("gp-predict")
@click.option("--model", "model_path", type=click.Path(dir_okay=False), required=True, help="Model JSON from gp-fit.")
@click.option("--inputs", type=click.Path(dir_okay=False), required=True, help="CSV with columns x1..xd.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output CSV x1..xd,mean,variance.")
@click.option("--latent-variance", is_flag=True, help="Report the latent function variance (no observation noise).")
@_handle_errors
def gp_predict(model_path, inputs, out, latent_variance):
    """Posterior predictive mean and variance at new inputs."""
    kernel, noise, X, y, offset = io.load_model(model_path)
    Xs = io.read_inputs(inputs, kernel.d)
    model = gp.fit_gp(X, y, kernel, noise)
    mean, var = gp.predict(model, Xs, latent=latent_variance)
    header = [f"x{j + 1}" for j in range(kernel.d)] + ["mean", "variance"]
    io.write_table(out, header, [*Xs.T, mean + offset, var])


@main.command("approx")
@click.option("--target", type=click.Choice(["ifbm"]), default="ifbm", show_default=True)
@click.option("--hurst", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), required=True)
@click.option("--family", type=click.Choice(sorted(FAMILIES)), required=True)
@click.option("--components", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--restarts", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-iters", type=click.IntRange(min=0), default=2000, show_default=True)
@click.option("--self-fit", is_flag=True, help="Replace the target by a random kernel of the same family.")
@click.option("--grid-start", type=float, default=0.01, show_default=True)
@click.option("--grid-step", type=click.FloatRange(min=0.0, min_open=True), default=0.02, show_default=True)
@click.option("--grid-num", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True, help="Output directory.")
@_handle_errors
def approx(target, hurst, family, components, restarts, seed, max_iters, self_fit, grid_start, grid_step, grid_num, out):
    """Fit a kernel family to a target covariance on a grid of (t, s) pairs.

    Writes report.json, kernel.json and sections.csv (k(t, 0.5) for the target
    and the fit) into the output directory.
    """
    start = time.perf_counter()
    grid = EvalGrid(grid_start, grid_step, grid_num)
    if grid_start <= 0 and target == "ifbm" and not self_fit:
        raise InputError("the ifbm target needs a grid of strictly positive times")
    config = OptimizerConfig(max_iter=max_iters, restarts=restarts, seed=seed)
    tgt = bench.self_fit_target(family, components, config) if self_fit else IFBMKernel(hurst)
    result = bench.approximate(tgt, family, components, config, grid)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "report.json", "kernel": out / "kernel.json", "sections": out / "sections.csv"}
    io.write_json(paths["kernel"], kernel_to_dict(result.kernel))
    t, k_target, k_fit = bench.sections(result)
    io.write_table(paths["sections"], ["t", "s", "target", "fitted"], [t, np.full_like(t, bench.SECTION_AT), k_target, k_fit])
    cfg = {
        "target": "self" if self_fit else target,
        "hurst": hurst,
        "family": family,
        "components": components,
        "restarts": restarts,
        "max_iters": max_iters,
        "grid": {"start": grid_start, "step": grid_step, "num": grid_num},
    }
    if self_fit:
        cfg["target_kernel"] = kernel_to_dict(tgt)
    rep = result.report
    io.RunReport(
        command=_command_echo(),
        config=cfg,
        seed=seed,
        metrics={
            "normalized_rmse": result.nrmse,
            "rmse": math.sqrt(rep.fun / grid.num**2),
            "sse": rep.fun,
            "best_restart": rep.best_restart,
        },
        traces=[_finite(tr) for tr in rep.traces],
        wall_time=time.perf_counter() - start,
        outputs={k: str(v) for k, v in paths.items()},
    ).save(paths["report"])
    click.echo(f"{family} hurst={hurst}: normalized RMSE {result.nrmse:.4f}")


@main.command("rff")
@click.option("--kernel", "kernel_path", type=click.Path(dir_okay=False), required=True, help="Stationary kernel JSON.")
@click.option("--features", type=click.IntRange(min=1), required=True, help="Number of sampled frequencies M.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tau-max", type=click.FloatRange(min=0.0), default=2.0, show_default=True)
@click.option("--tau-steps", type=click.IntRange(min=1), default=101, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_handle_errors
def rff(kernel_path, features, seed, tau_max, tau_steps, out):
    """Compare a random-Fourier-feature estimate with the exact stationary kernel.

    For d > 1 the offsets run along the first input axis.
    """
    kernel, _ = io.load_kernel(kernel_path)
    if isinstance(kernel, NonstationaryGSK):
        raise InputError("random Fourier features need a stationary kernel; got a nonstationary config")
    if isinstance(kernel, SparseSpectrumKernel):
        kernel = kernel.as_gsk()
    basis = sample_frequencies(kernel, features, seed)
    tau = np.linspace(0.0, tau_max, tau_steps)
    offsets = np.zeros((tau_steps, kernel.d))
    offsets[:, 0] = tau
    exact = kernel(offsets, np.zeros((1, kernel.d)))[:, 0]
    estimate = estimate_kernel(basis, offsets)
    io.write_table(out, ["tau", "exact", "estimate", "abs_error"], [tau, exact, estimate, np.abs(estimate - exact)])


def parse_grid_spec(spec: str) -> np.ndarray:
    """``start:stop:num`` per input dimension, comma separated; returns the product grid."""
    axes = []
    for part in spec.split(","):
        fields = part.strip().split(":")
        if len(fields) != 3:
            raise InputError(f"grid spec {part!r} must look like start:stop:num")
        try:
            lo, hi, num = float(fields[0]), float(fields[1]), int(fields[2])
        except ValueError:
            raise InputError(f"grid spec {part!r} must look like start:stop:num") from None
        if num < 1:
            raise InputError("grid spec needs num >= 1")
        axes.append(np.linspace(lo, hi, num))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.reshape(-1) for m in mesh])


@main.command("sample-prior")
@click.option("--kernel", "kernel_path", type=click.Path(dir_okay=False), required=True)
@click.option("--grid-spec", required=True, help="start:stop:num per dimension, comma separated (at most 2000 points).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_handle_errors
def sample_prior(kernel_path, grid_spec, seed, out):
    """Draw one zero-mean sample path from the kernel's Gaussian process prior."""
    kernel, _ = io.load_kernel(kernel_path)
    X = parse_grid_spec(grid_spec)
    if X.shape[1] != kernel.d:
        raise InputError(f"grid has {X.shape[1]} dimensions but the kernel has d={kernel.d}")
    if X.shape[0] > MAX_PRIOR_POINTS:
        raise InputError(f"grid has {X.shape[0]} points; the limit is {MAX_PRIOR_POINTS}")
    L, _ = gp.cholesky_jitter(kernel(X))
    f = L @ np.random.default_rng(seed).standard_normal(X.shape[0])
    io.write_table(out, [f"x{j + 1}" for j in range(kernel.d)] + ["f"], [*X.T, f])


if __name__ == "__main__":  # pragma: no cover
    main()
