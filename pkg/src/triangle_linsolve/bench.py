"""Experiment grid: regime x dimension x tolerance x seed x method, written as CSV rows."""

from __future__ import annotations

import csv
import logging
import os
import statistics
import time
from dataclasses import astuple, dataclass, replace
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .baselines import bicgstab, steepest_descent_normal
from .instances import InstanceSpec, Kind, generate
from .solver import InconclusiveError, SolverConfig, solve

__all__ = ["METHODS", "DEFAULT_EPSILONS", "ExperimentRow", "run_grid", "emit_csv", "summarize", "row_values", "CSV_HEADER"]

log = logging.getLogger(__name__)

METHODS = ("TA", "BiCGSTAB", "BiCGSTAB-Jacobi", "SteepestDescent")
DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)
CSV_HEADER = ("method", "kind", "m", "n", "epsilon", "seed", "wall_time_ms",
              "iterations", "residual", "normal_residual", "outcome")


@dataclass(frozen=True)
class ExperimentRow:
    method: str
    kind: str
    m: int
    n: int
    epsilon: float
    seed: int
    wall_time_ms: float
    iterations: int
    residual: float
    normal_residual: float
    outcome_tag: str


def _run_method(method: str, A: np.ndarray, b: np.ndarray, eps: float, cfg: SolverConfig):
    """Return ``(iterations, residual, normal_residual, tag)`` for one solve."""
    if method == "TA":
        try:
            out = solve(A, b, cfg)
        except InconclusiveError as exc:
            res = A @ exc.state.x_prime - b
            return exc.state.iterations, float(np.linalg.norm(res)), float(np.linalg.norm(res @ A)), "Inconclusive"
        return out.iterations, out.residual, out.normal_residual, out.tag.value
    b_norm = float(np.linalg.norm(b))
    if method in ("BiCGSTAB", "BiCGSTAB-Jacobi"):
        # absolute residual target eps, matching the Triangle Algorithm's stopping rule
        rep = bicgstab(A, b, tol=eps / b_norm, precond="jacobi" if method.endswith("Jacobi") else "none")
    elif method == "SteepestDescent":
        rep = steepest_descent_normal(A, b, tol=eps)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    return rep.iterations, rep.residual, rep.normal_residual, rep.tag


def run_grid(kinds: Sequence[Kind | str], dims: Sequence[int], epsilons: Sequence[float],
             seeds: Sequence[int], methods: Sequence[str], consistent: bool = True,
             config: Optional[SolverConfig] = None,
             on_row: Optional[Callable[[ExperimentRow], None]] = None) -> list[ExperimentRow]:
    """Run every (kind, dim, epsilon, seed, method) cell in that nesting order.

    Square ``dim x dim`` instances are regenerated from their seed, outside
    the timed region. A cell that raises is recorded with outcome ``error``
    and the grid carries on. `config` supplies Triangle Algorithm settings;
    its ``epsilon`` is overridden per cell. `on_row` sees each row as soon as
    it is finished.
    """
    for name, values in (("kinds", kinds), ("dims", dims), ("epsilons", epsilons),
                         ("seeds", seeds), ("methods", methods)):
        if len(values) == 0:
            raise ValueError(f"{name} must not be empty")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    base = config or SolverConfig()
    rows = []
    for kind, dim in product(kinds, dims):
        kind = Kind(kind)
        for eps, seed in product(epsilons, seeds):
            inst = None
            for method in methods:
                t0 = time.perf_counter()
                try:
                    if inst is None:
                        inst = generate(InstanceSpec(kind, dim, dim, seed, consistent=consistent))
                    cfg = replace(base, epsilon=eps)
                    t0 = time.perf_counter()
                    its, res, nres, tag = _run_method(method, inst.A, inst.b, eps, cfg)
                except Exception:
                    log.exception("cell %s %s n=%d eps=%g seed=%d failed", method, kind.value, dim, eps, seed)
                    its, res, nres, tag = 0, float("nan"), float("nan"), "error"
                wall = (time.perf_counter() - t0) * 1e3
                row = ExperimentRow(method, kind.value, dim, dim, eps, seed, wall, its, res, nres, tag)
                rows.append(row)
                if on_row is not None:
                    on_row(row)
    return rows


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def row_values(row: ExperimentRow) -> list[str]:
    """CSV cells for `row`, in header order; floats use ``repr`` so they round-trip."""
    return [_fmt(v) for v in astuple(row)]


def emit_csv(rows: Iterable[ExperimentRow], path: str | os.PathLike) -> None:
    """Write rows, in the given order, under the fixed CSV header."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(row_values(row))
    except OSError as exc:
        raise OSError(f"cannot write benchmark CSV to {os.fspath(path)!r}: {exc}") from exc


def summarize(rows: Iterable[ExperimentRow]) -> list[dict]:
    """Median wall time and iterations over seeds per (method, kind, n, epsilon)."""
    groups: dict[tuple, list[ExperimentRow]] = {}
    for row in rows:
        groups.setdefault((row.method, row.kind, row.m, row.n, row.epsilon), []).append(row)
    out = []
    for (method, kind, m, n, eps), members in groups.items():
        out.append({
            "method": method, "kind": kind, "m": m, "n": n, "epsilon": eps,
            "seeds": len(members),
            "median_wall_time_ms": statistics.median(r.wall_time_ms for r in members),
            "median_iterations": statistics.median(r.iterations for r in members),
            "outcomes": sorted({r.outcome_tag for r in members}),
        })
    return out
