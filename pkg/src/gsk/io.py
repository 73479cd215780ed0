"""CSV and JSON artifacts: datasets, kernel/model files and run reports.

Numbers are written with ``repr`` so every float round-trips exactly, and
parsing never depends on the locale.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from gsk.exceptions import InputError
from gsk.kernels import SCHEMA_VERSION, kernel_from_dict, kernel_to_dict


def fmt(x) -> str:
    return repr(float(x))


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"line {line}: column {column!r} is not a number: {text!r}") from None


def read_table(path, required: list[str] | None = None):
    """Read a headed numeric CSV.

    Returns the header and an ``(n, ncols)`` array. ``required`` columns must be
    present; errors name the offending line (the header is line 1).
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not valid UTF-8") from None
    if not rows:
        raise InputError(f"{path}: line 1: missing header row")
    header = [h.strip() for h in rows[0]]
    for name in required or []:
        if name not in header:
            raise InputError(f"{path}: line 1: missing required column {name!r} (header is {','.join(header)})")
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{path}: line {i}: expected {len(header)} fields, got {len(row)}")
        data.append([_parse_float(c.strip(), i, header[j]) for j, c in enumerate(row)])
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return header, arr


def _x_columns(header: list[str], path) -> list[int]:
    idx = []
    j = 1
    while f"x{j}" in header:
        idx.append(header.index(f"x{j}"))
        j += 1
    if not idx:
        raise InputError(f"{path}: line 1: no input columns (expected x1..xd)")
    return idx


def read_dataset(path):
    """Training data with columns ``x1..xd, y``. Returns ``(X, y)``."""
    header, arr = read_table(path, required=["y"])
    cols = _x_columns(header, path)
    return arr[:, cols], arr[:, header.index("y")]


def read_inputs(path, d: int):
    """Prediction inputs with columns ``x1..xd``. An empty file yields zero rows."""
    path = Path(path)
    if path.exists() and path.stat().st_size == 0:
        return np.zeros((0, d))
    header, arr = read_table(path, required=[f"x{j + 1}" for j in range(d)])
    if f"x{d + 1}" in header:
        raise InputError(f"{path}: line 1: inputs have more than the model's {d} columns")
    return arr[:, [header.index(f"x{j + 1}") for j in range(d)]]


def write_table(path, header: list[str], columns) -> None:
    cols = [np.asarray(c, dtype=float).reshape(-1) for c in columns]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None


def load_kernel(path):
    """Kernel and optional noise variance from a kernel or model JSON file."""
    cfg = read_json(path)
    if not isinstance(cfg, dict):
        raise InputError(f"{path}: expected a JSON object")
    return kernel_from_dict(cfg.get("kernel", cfg))


def model_to_dict(kernel, noise_variance: float, X, y, y_offset: float = 0.0) -> dict:
    """Fitted model: kernel, noise and the (centered) training set needed to predict."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kernel": kernel_to_dict(kernel, noise_variance),
        "y_offset": float(y_offset),
        "train": {"X": np.asarray(X, dtype=float).tolist(), "y": np.asarray(y, dtype=float).tolist()},
    }


def load_model(path):
    """``(kernel, noise_variance, X, y, y_offset)`` from a fitted-model file.

    ``y`` is the stored training target with ``y_offset`` already removed.
    """
    cfg = read_json(path)
    if not isinstance(cfg, dict) or "kernel" not in cfg:
        raise InputError(f"{path}: not a model file (missing 'kernel')")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported schema_version {cfg.get('schema_version')!r}")
    kernel, noise = kernel_from_dict(cfg["kernel"])
    y_offset = cfg.get("y_offset", 0.0)
    if not isinstance(y_offset, (int, float)):
        raise InputError(f"{path}: y_offset must be a number")
    train = cfg.get("train", {"X": [], "y": []})
    try:
        X = np.array(train["X"], dtype=float).reshape(-1, kernel.d)
        y = np.array(train["y"], dtype=float).reshape(-1)
    except (KeyError, TypeError, ValueError):
        raise InputError(f"{path}: malformed 'train' block") from None
    if X.shape[0] != y.size:
        raise InputError(f"{path}: training inputs and targets differ in length")
    return kernel, 0.0 if noise is None else noise, X, y, float(y_offset)


@dataclass
class RunReport:
    """Everything needed to audit and rerun one CLI invocation."""

    command: list[str]
    config: dict[str, Any]
    seed: int | None
    metrics: dict[str, float] = field(default_factory=dict)
    traces: list[list[float]] = field(default_factory=list)
    wall_time: float = 0.0
    outputs: dict[str, str] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        try:
            return cls(**d)
        except TypeError as exc:
            raise InputError(f"malformed run report: {exc}") from None

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "RunReport":
        return cls.from_dict(read_json(path))
