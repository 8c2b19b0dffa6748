"""Triangle Algorithm driver for ``Ax = b`` with an escalating radius.

:func:`solve` runs the fixed-radius Triangle iteration from
:mod:`.membership` and, whenever the iterate becomes a witness, enlarges the
radius to ``max((p - p')^T p / ||c||, 2 r)`` while keeping ``x'``. It stops
with an approximate solution, an approximate normal-equation solution, or a
certificate that the system has no solution.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .linalg import as_matrix, as_vector, operator_norm_estimate
from .membership import (
    MembershipState,
    MembershipTag,
    PivotMode,
    TraceRecord,
    TraceSink,
    advance,
    pivot_slack,
    run_membership,
)

__all__ = [
    "SolverConfig",
    "SolveTag",
    "SolveOutcome",
    "MinNormResult",
    "InconclusiveError",
    "radius_update",
    "delta_lower_bound",
    "solve",
    "min_norm_refine",
]

DEFAULT_MAX_ITERS = 2_000_000


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits for :func:`solve`.

    Unset fields are resolved per problem by :meth:`resolve`:

    - ``r0`` defaults to ``||b|| / ||A||`` (estimated spectral norm).
    - ``radius_cap`` defaults to ``||b||^2 / epsilon``, or to
      ``(||b|| / epsilon) * max(||b||, 2 / sigma_star_hint)`` when a lower
      bound on the smallest positive singular value is supplied.
    - ``normal_eq_tol`` and ``unsolvable_tol`` default to ``epsilon``;
      ``unsolvable_margin`` to ``2 * epsilon``. An unsolvability certificate
      requires ``|(p - p')^T p - ||p - p'||^2| <= unsolvable_tol`` and
      ``(p - p')^T p >= unsolvable_margin``; set the margin to ``inf`` to
      disable it.
    - ``time_limit`` is an optional wall-clock budget in seconds.
    """

    epsilon: float = 1e-2
    r0: Optional[float] = None
    radius_cap: Optional[float] = None
    pivot_mode: PivotMode = PivotMode.STANDARD
    max_iters_total: int = DEFAULT_MAX_ITERS
    normal_eq_tol: Optional[float] = None
    sigma_star_hint: Optional[float] = None
    unsolvable_tol: Optional[float] = None
    unsolvable_margin: Optional[float] = None
    time_limit: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.r0 is not None and self.r0 <= 0:
            raise ValueError("r0 must be positive")
        if self.radius_cap is not None and self.r0 is not None and self.radius_cap < self.r0:
            raise ValueError("radius_cap must be >= r0")
        if self.sigma_star_hint is not None and self.sigma_star_hint <= 0:
            raise ValueError("sigma_star_hint must be positive")
        if self.max_iters_total < 1:
            raise ValueError("max_iters_total must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        object.__setattr__(self, "pivot_mode", PivotMode(self.pivot_mode))

    def resolve(self, A: np.ndarray, b: np.ndarray) -> "SolverConfig":
        """Fill every defaulted field for the system ``(A, b)``."""
        eps = self.epsilon
        b_norm = float(np.linalg.norm(b))
        r0 = self.r0
        if r0 is None:
            sigma = operator_norm_estimate(A)
            r0 = b_norm / sigma if sigma > 0 else 1.0
            r0 = r0 if r0 > 0 else 1.0
        cap = self.radius_cap
        if cap is None:
            if self.sigma_star_hint is not None:
                cap = (b_norm / eps) * max(b_norm, 2.0 / self.sigma_star_hint)
            else:
                cap = b_norm**2 / eps
            cap = max(cap, r0)
        return replace(
            self, r0=r0, radius_cap=cap,
            normal_eq_tol=eps if self.normal_eq_tol is None else self.normal_eq_tol,
            unsolvable_tol=eps if self.unsolvable_tol is None else self.unsolvable_tol,
            unsolvable_margin=2 * eps if self.unsolvable_margin is None else self.unsolvable_margin,
        )


class SolveTag(str, enum.Enum):
    EPS_SOLUTION = "EpsSolution"
    NORMAL_EQ_EPS_SOLUTION = "NormalEqEpsSolution"
    UNSOLVABLE = "Unsolvable"


@dataclass
class SolveOutcome:
    """Result of :func:`solve`.

    ``residual`` is ``||A x - b||`` and ``normal_residual`` is
    ``||A^T A x - A^T b||``, both recomputed from ``x``. For ``Unsolvable``
    outcomes ``delta_lower_bound`` bounds ``min_x ||A x - b||`` from below.
    """

    tag: SolveTag
    x: np.ndarray
    residual: float
    normal_residual: float
    delta_lower_bound: Optional[float]
    radius_history: list[float]
    iterations: int
    wall_time_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "tag": self.tag.value,
            "residual": self.residual,
            "normal_residual": self.normal_residual,
            "delta_lower_bound": self.delta_lower_bound,
            "iterations": self.iterations,
            "radius_history": list(self.radius_history),
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass
class MinNormResult:
    x: np.ndarray
    r_low: float
    r_high: float
    residual: float
    probes: int = 0


class InconclusiveError(RuntimeError):
    """Raised when :func:`solve` runs out of radius and iterations without a verdict.

    ``state`` holds the last iterate and ``radius_history`` the radii visited.
    """

    def __init__(self, message: str, state: MembershipState, radius_history: list[float]):
        super().__init__(message)
        self.state = state
        self.radius_history = radius_history


def radius_update(r: float, p: np.ndarray, p_prime: np.ndarray, c: np.ndarray) -> float:
    """Next radius after a witness: ``max((p - p')^T p / ||c||, 2 r)``."""
    c_norm = float(np.linalg.norm(c))
    if c_norm == 0.0:
        raise ValueError("zero direction: no radius increase can help, check unsolvability instead")
    return max(float((p - p_prime) @ p) / c_norm, 2.0 * r)


def delta_lower_bound(p: np.ndarray, p_prime: np.ndarray, epsilon: float) -> Optional[float]:
    """Lower bound ``sqrt(((p - p')^T p - epsilon) / 4)`` on the least-squares residual.

    Only meaningful at a witness with ``||c|| <= epsilon`` and
    ``|(p - p')^T p - ||p - p'||^2| <= epsilon`` at a radius no smaller than
    the minimum-norm solution's norm. Returns None when
    ``(p - p')^T p <= epsilon``.
    """
    s = float((p - p_prime) @ p)
    if s <= epsilon:
        return None
    return math.sqrt((s - epsilon) / 4.0)


def _finish(A, b, tag, x, history, iterations, start, delta=None) -> SolveOutcome:
    res = A @ x - b
    return SolveOutcome(
        tag=tag, x=x, residual=float(np.linalg.norm(res)),
        normal_residual=float(np.linalg.norm(res @ A)),
        delta_lower_bound=delta, radius_history=history, iterations=iterations,
        wall_time_ms=(time.perf_counter() - start) * 1e3,
    )


def solve(A, b, cfg: Optional[SolverConfig] = None, trace: TraceSink = None) -> SolveOutcome:
    """Approximately solve ``Ax = b`` for an arbitrary real ``m x n`` matrix.

    The outcome tag is one of

    - ``EpsSolution``: ``||A x - b|| <= epsilon``.
    - ``NormalEqEpsSolution``: reached the radius cap at a witness with
      ``||A^T A x - A^T b|| <= normal_eq_tol``.
    - ``Unsolvable``: as above, and additionally the unsolvability side
      conditions hold, so ``min_x ||A x - b|| >= delta_lower_bound >= sqrt(epsilon) / 2``.
      Also returned at any radius when ``A^T (b - A x) = 0`` exactly with
      ``||A x - b|| > epsilon``, since ``x`` is then a least-squares solution.

    A zero `b` returns ``x = 0`` immediately. Raises
    :class:`InconclusiveError` if the radius cap, ``max_iters_total`` or
    ``time_limit`` is exhausted without any of the above.
    """
    start = time.perf_counter()
    A = as_matrix(A)
    b = as_vector(b)
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    cfg = (cfg or SolverConfig()).resolve(A, b)
    eps = cfg.epsilon
    if not np.any(b):
        return _finish(A, b, SolveTag.EPS_SOLUTION, np.zeros(A.shape[1]), [], 0, start)

    deadline = None if cfg.time_limit is None else start + cfg.time_limit
    state = MembershipState.initial(A, b, cfg.r0)
    history = [state.r]
    slack = pivot_slack(b)
    p = b

    def emit(event, alpha=0.0):
        if trace is not None:
            trace(TraceRecord(state.iterations, state.gap, state.r, alpha, event))

    while True:
        tag = advance(A, state, eps, cfg.pivot_mode, slack, cfg.max_iters_total, trace, deadline)
        if tag == MembershipTag.NEAR_POINT:
            emit("near")
            return _finish(A, b, SolveTag.EPS_SOLUTION, state.x_prime, history, state.iterations, start)
        if tag in (MembershipTag.ITERATION_CAP, MembershipTag.TIME_LIMIT):
            emit("cap" if tag == MembershipTag.ITERATION_CAP else "timeout")
            reason = "iterations" if tag == MembershipTag.ITERATION_CAP else "time limit"
            raise InconclusiveError(
                f"no verdict after {state.iterations} iterations ({reason} exhausted, radius {state.r:.6g}, "
                f"gap {state.gap:.3g})", state, history)

        emit("witness")
        c_norm = float(np.linalg.norm(state.c))
        at_cap = state.r >= cfg.radius_cap
        if c_norm == 0.0 or at_cap:
            d = p - state.p_prime
            s = float(d @ p)
            if c_norm <= cfg.normal_eq_tol:
                # ||p - p'||^2 is recomputed here, not taken from the running gap
                side_ok = abs(s - float(d @ d)) <= cfg.unsolvable_tol and s >= cfg.unsolvable_margin
                if side_ok:
                    emit("unsolvable")
                    return _finish(A, b, SolveTag.UNSOLVABLE, state.x_prime, history, state.iterations,
                                   start, delta_lower_bound(p, state.p_prime, eps))
                emit("normal")
                return _finish(A, b, SolveTag.NORMAL_EQ_EPS_SOLUTION, state.x_prime, history,
                               state.iterations, start)
            raise InconclusiveError(
                f"witness at radius cap {cfg.radius_cap:.6g} with ||c|| = {c_norm:.3g} "
                f"> normal_eq_tol {cfg.normal_eq_tol:.3g}", state, history)

        state.r = min(radius_update(state.r, p, state.p_prime, state.c), cfg.radius_cap)
        history.append(state.r)
        emit("radius")


def min_norm_refine(A, b, cfg: Optional[SolverConfig], r_feasible: float, width: float,
                    max_iters: Optional[int] = None) -> MinNormResult:
    """Bisect on the radius to find a near-minimal-norm epsilon-solution.

    Keeps ``r_high`` at a radius where the fixed-radius iteration found
    ``||A x - b|| <= epsilon`` and ``r_low`` at one where it produced a
    witness (or 0), halving ``[r_low, r_high]`` until it is at most `width`
    wide. Probes that hit the iteration cap are counted as failures, so
    ``r_high`` is always certified. Returns the solution found at ``r_high``.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    if r_feasible <= 0:
        raise ValueError("r_feasible must be positive")
    cfg = cfg or SolverConfig()
    A = as_matrix(A)
    b = as_vector(b)
    if max_iters is None:
        max_iters = cfg.max_iters_total

    def probe(r):
        return run_membership(A, b, r, cfg.epsilon, max_iters=max_iters, pivot_mode=cfg.pivot_mode)

    first = probe(r_feasible)
    if first.tag != MembershipTag.NEAR_POINT:
        raise ValueError(f"no epsilon-solution found at r_feasible = {r_feasible}")
    lo, hi, x = 0.0, float(r_feasible), first.state.x_prime
    probes = 1
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        res = probe(mid)
        probes += 1
        if res.tag == MembershipTag.NEAR_POINT:
            hi, x = mid, res.state.x_prime
        else:
            lo = mid
    return MinNormResult(x=x, r_low=lo, r_high=hi, residual=float(np.linalg.norm(A @ x - b)), probes=probes)
