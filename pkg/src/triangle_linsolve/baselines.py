"""Reference iterative solvers: BiCGSTAB and steepest descent on the normal equations."""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import as_matrix, as_vector

__all__ = ["Method", "BaselineReport", "bicgstab", "steepest_descent_normal"]

BREAKDOWN_TOL = 1e-300


class Method(str, enum.Enum):
    BICGSTAB = "BiCGSTAB"
    STEEPEST_DESCENT_NORMAL = "SteepestDescentNormal"


@dataclass
class BaselineReport:
    method: Method
    x: np.ndarray
    residual: float
    normal_residual: float
    iterations: int
    converged: bool
    breakdown: Optional[str] = None
    wall_time_ms: float = 0.0

    @property
    def tag(self) -> str:
        if self.converged:
            return "Converged"
        return "Breakdown" if self.breakdown else "NotConverged"

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "tag": self.tag,
            "residual": self.residual,
            "normal_residual": self.normal_residual,
            "delta_lower_bound": None,
            "iterations": self.iterations,
            "radius_history": [],
            "wall_time_ms": self.wall_time_ms,
            "converged": self.converged,
            "breakdown": self.breakdown,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _report(method, A, b, x, iterations, converged, breakdown, start):
    res = A @ x - b
    return BaselineReport(
        method=method, x=x, residual=float(np.linalg.norm(res)),
        normal_residual=float(np.linalg.norm(res @ A)), iterations=iterations,
        converged=converged, breakdown=breakdown, wall_time_ms=(time.perf_counter() - start) * 1e3,
    )


def bicgstab(A, b, tol: float = 1e-8, max_iters: Optional[int] = None, precond: str = "none") -> BaselineReport:
    """Unrestarted BiCGSTAB (van der Vorst, 1992) with optional right Jacobi preconditioning.

    Converged means the true residual satisfies ``||Ax - b|| <= tol * ||b||``
    within `max_iters` iterations (default ``10 n``). The run stops with a
    breakdown reason when ``rho``, ``r0^T v`` or ``omega`` falls below 1e-300
    in magnitude.
    """
    start = time.perf_counter()
    A = as_matrix(A)
    b = as_vector(b)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError(f"BiCGSTAB needs a square matrix, got {A.shape}")
    if b.shape != (n,):
        raise ValueError(f"b has shape {b.shape}, expected ({n},)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if precond not in ("none", "jacobi"):
        raise ValueError(f"unknown preconditioner {precond!r}")
    if max_iters is None:
        max_iters = 10 * n

    if precond == "jacobi":
        diag = np.diag(A).copy()
        diag[diag == 0] = 1.0
        inv_diag = 1.0 / diag
        apply_m = lambda v: inv_diag * v
    else:
        apply_m = lambda v: v

    x = np.zeros(n)
    threshold = tol * float(np.linalg.norm(b))
    r = b.copy()
    if np.linalg.norm(r) <= threshold:
        return _report(Method.BICGSTAB, A, b, x, 0, True, None, start)
    r_hat = r.copy()
    rho_prev = alpha = omega = 1.0
    v = np.zeros(n)
    p = np.zeros(n)
    breakdown = None
    it = 0
    while it < max_iters:
        it += 1
        rho = float(r_hat @ r)
        if abs(rho) < BREAKDOWN_TOL:
            breakdown = "rho"
            break
        beta = (rho / rho_prev) * (alpha / omega)
        p = r + beta * (p - omega * v)
        p_hat = apply_m(p)
        v = A @ p_hat
        denom = float(r_hat @ v)
        if abs(denom) < BREAKDOWN_TOL:
            breakdown = "r_hat^T v"
            break
        alpha = rho / denom
        s = r - alpha * v
        if np.linalg.norm(s) <= threshold:
            x = x + alpha * p_hat
            break
        s_hat = apply_m(s)
        t = A @ s_hat
        tt = float(t @ t)
        omega = float(t @ s) / tt if tt > 0 else 0.0
        if abs(omega) < BREAKDOWN_TOL:
            x = x + alpha * p_hat
            breakdown = "omega"
            break
        x = x + alpha * p_hat + omega * s_hat
        r = s - omega * t
        rho_prev = rho
        if np.linalg.norm(r) <= threshold:
            r = b - A @ x
            if np.linalg.norm(r) <= threshold:
                return _report(Method.BICGSTAB, A, b, x, it, True, None, start)
    converged = breakdown is None and bool(np.linalg.norm(A @ x - b) <= threshold)
    return _report(Method.BICGSTAB, A, b, x, it, converged, breakdown, start)


def steepest_descent_normal(A, b, tol: float = 1e-8, max_iters: int = 100_000) -> BaselineReport:
    """Gradient descent with exact line search on ``0.5 ||Ax - b||^2``.

    Converged means ``||A^T A x - A^T b|| <= tol``.
    """
    start = time.perf_counter()
    A = as_matrix(A)
    b = as_vector(b)
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.zeros(A.shape[1])
    res = -b
    it = 0
    converged = False
    while True:
        g = res @ A
        gg = float(g @ g)
        if np.sqrt(gg) <= tol:
            converged = True
            break
        if it >= max_iters:
            break
        Ag = A @ g
        step = gg / float(Ag @ Ag)
        x = x - step * g
        res = res - step * Ag
        it += 1
        if it % 1024 == 0:
            res = A @ x - b
    return _report(Method.STEEPEST_DESCENT_NORMAL, A, b, x, it, converged, None, start)
