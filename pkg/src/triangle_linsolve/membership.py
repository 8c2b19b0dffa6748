"""Triangle iteration for testing whether ``b`` lies near the ellipsoid ``{Ax : ||x|| <= r}``.

The iterate ``p'`` always lives in the ellipsoid, carried together with a
preimage ``x'`` (``p' = A x'``, ``||x'|| <= r``). At each step the point of
the ellipsoid extreme in the direction ``c = A^T (b - p')`` is tested as a
pivot; if it is one, ``p'`` moves to the nearest point to ``b`` on the segment
towards it, otherwise ``p'`` is a witness that ``b`` is outside.
"""

from __future__ import annotations

import csv
import enum
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import as_matrix, as_vector, operator_norm_estimate

__all__ = [
    "PivotMode",
    "MembershipTag",
    "MembershipState",
    "WitnessCertificate",
    "MembershipResult",
    "TraceRecord",
    "CsvTrace",
    "direction",
    "pivot_point",
    "pivot_test",
    "strict_pivot_test",
    "step_length",
    "step",
    "run_membership",
    "default_max_iters",
]

# p' is recomputed from x' this often to stop round-off drift between the two
RESYNC_EVERY = 1024
MAX_ITERS_CEILING = 10**7


class PivotMode(str, enum.Enum):
    STANDARD = "standard"
    STRICT = "strict"


class MembershipTag(str, enum.Enum):
    NEAR_POINT = "NearPoint"
    WITNESS = "Witness"
    ITERATION_CAP = "IterationCapReached"
    TIME_LIMIT = "TimeLimitReached"


@dataclass
class MembershipState:
    """Live iterate of the Triangle iteration.

    ``p`` is the target, ``p_prime = A @ x_prime`` the current point of the
    ellipsoid of radius ``r``, ``c = A.T @ (p - p_prime)`` the last direction
    and ``gap = ||p - p_prime||``.
    """

    p: np.ndarray
    p_prime: np.ndarray
    x_prime: np.ndarray
    r: float
    c: np.ndarray
    gap: float
    iterations: int = 0

    @classmethod
    def initial(cls, A: np.ndarray, b: np.ndarray, r: float) -> "MembershipState":
        m, n = A.shape
        return cls(p=b, p_prime=np.zeros(m), x_prime=np.zeros(n), r=float(r),
                   c=b @ A, gap=float(np.linalg.norm(b)))


@dataclass(frozen=True)
class WitnessCertificate:
    """Proof that ``b`` is outside the ellipsoid, with a bracket on its distance.

    With standard pivots the distance ``delta_r`` from ``b`` to the ellipsoid
    satisfies ``delta_lower <= delta_r <= delta_upper`` where
    ``delta_lower = gap / 2`` and ``delta_upper = gap``. ``separation_bound``
    is the distance from ``b`` to the separating hyperplane
    ``{y : (p - p')^T y = r ||c||}``, a lower bound on ``delta_r`` that is
    valid for either pivot mode and never smaller than ``gap / 2`` for a
    standard witness. ``radius_lower_bound`` is a radius below which ``b``
    cannot belong to the ellipsoid (``inf`` when ``c = 0``).
    """

    p_prime: np.ndarray
    x_prime: np.ndarray
    gap: float
    delta_lower: float
    delta_upper: float
    radius_lower_bound: float
    separation_bound: float


@dataclass
class MembershipResult:
    tag: MembershipTag
    state: MembershipState
    certificate: Optional[WitnessCertificate] = None


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    gap: float
    radius: float
    alpha: float
    event: str


TRACE_FIELDS = ("iter", "gap", "radius", "alpha", "event")


class CsvTrace:
    """Trace sink writing ``iter,gap,radius,alpha,event`` rows to a CSV file.

    Use as a context manager and pass the instance as ``trace=``.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._fh = None
        self._writer = None

    def __enter__(self) -> "CsvTrace":
        self._fh = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(TRACE_FIELDS)
        return self

    def __call__(self, rec: TraceRecord) -> None:
        self._writer.writerow([rec.iteration, repr(rec.gap), repr(rec.radius), repr(rec.alpha), rec.event])

    def __exit__(self, *exc) -> None:
        self._fh.close()


TraceSink = Optional[Callable[[TraceRecord], None]]


def direction(A: np.ndarray, p: np.ndarray, p_prime: np.ndarray) -> np.ndarray:
    """Return ``A.T @ (p - p_prime)``."""
    return (p - p_prime) @ A


def pivot_point(A: np.ndarray, c: np.ndarray, r: float) -> np.ndarray:
    """Point of the radius-`r` ellipsoid maximizing ``(p - p')^T y``, i.e. ``r A c / ||c||``."""
    c_norm = float(np.linalg.norm(c))
    if c_norm == 0.0:
        raise ValueError("zero direction: the current iterate is already a witness")
    if r <= 0:
        raise ValueError("radius must be positive")
    return A @ ((r / c_norm) * c)


def pivot_test(r: float, c: np.ndarray, p: np.ndarray, p_prime: np.ndarray, slack: float = 0.0) -> bool:
    """True iff ``r ||c|| >= (||p||^2 - ||p'||^2) / 2`` (up to `slack`); ties count as pivots."""
    return r * float(np.linalg.norm(c)) >= 0.5 * (float(p @ p) - float(p_prime @ p_prime)) - slack


def strict_pivot_test(r: float, c: np.ndarray, p: np.ndarray, p_prime: np.ndarray, slack: float = 0.0) -> bool:
    """True iff ``r ||c|| >= (p - p')^T p`` (up to `slack`)."""
    return r * float(np.linalg.norm(c)) >= float((p - p_prime) @ p) - slack


def step_length(p: np.ndarray, p_prime: np.ndarray, v: np.ndarray) -> float:
    """Clamped step ``min(1, (p - p')^T (v - p') / ||v - p'||^2)``."""
    w = v - p_prime
    ww = float(w @ w)
    if ww == 0.0:
        raise ValueError("degenerate pivot: v coincides with the current iterate")
    return min(1.0, float((p - p_prime) @ w) / ww)


def step(p, p_prime, v_r, x_prime, x_v):
    """Move to the nearest point to `p` on the segment ``[p', v_r]``.

    Returns ``(p'', x'')``, applying the same convex combination to the
    preimages ``x'`` and ``x_v``.
    """
    alpha = step_length(p, p_prime, v_r)
    return (1.0 - alpha) * p_prime + alpha * v_r, (1.0 - alpha) * x_prime + alpha * x_v


def default_max_iters(r: float, A_norm: float, epsilon: float) -> int:
    bound = math.ceil((r * A_norm / epsilon) ** 2)
    return int(min(100 * bound, MAX_ITERS_CEILING)) if bound > 0 else 1


def pivot_slack(b: np.ndarray) -> float:
    return 1e-12 * (1.0 + float(b @ b))


def advance(A, state: MembershipState, epsilon: float, mode: PivotMode, slack: float,
            max_iters: int, trace: TraceSink = None, deadline: Optional[float] = None) -> MembershipTag:
    """Take pivot steps at the fixed radius ``state.r`` until a terminal condition.

    Mutates `state` in place. `max_iters` bounds the cumulative
    ``state.iterations``; `deadline` is a ``time.perf_counter()`` value
    checked every 256 steps. On a witness, ``state.c`` and ``state.gap``
    describe the witness iterate.
    """
    p = state.p
    p_sq = float(p @ p)
    strict = mode == PivotMode.STRICT
    r = state.r
    while True:
        d = p - state.p_prime
        gap = math.sqrt(float(d @ d))
        state.gap = gap
        if gap <= epsilon:
            # confirm against the preimage before declaring success
            state.p_prime = A @ state.x_prime
            d = p - state.p_prime
            gap = math.sqrt(float(d @ d))
            state.gap = gap
            if gap <= epsilon:
                state.c = d @ A
                return MembershipTag.NEAR_POINT
        c = d @ A
        state.c = c
        c_norm = math.sqrt(float(c @ c))
        if c_norm == 0.0:
            return MembershipTag.WITNESS
        if strict:
            threshold = float(d @ p)
        else:
            threshold = 0.5 * (p_sq - float(state.p_prime @ state.p_prime))
        if r * c_norm < threshold - slack:
            return MembershipTag.WITNESS
        if state.iterations >= max_iters:
            return MembershipTag.ITERATION_CAP
        x_v = (r / c_norm) * c
        w = A @ x_v - state.p_prime
        ww = float(w @ w)
        alpha = min(1.0, float(d @ w) / ww) if ww > 0.0 else 0.0
        if alpha <= 0.0:
            # no progress possible in floating point: treat as a witness
            return MembershipTag.WITNESS
        state.p_prime = state.p_prime + alpha * w
        state.x_prime = state.x_prime + alpha * (x_v - state.x_prime)
        state.iterations += 1
        if state.iterations % RESYNC_EVERY == 0:
            state.p_prime = A @ state.x_prime
        if trace is not None:
            trace(TraceRecord(state.iterations, gap, r, alpha, "pivot"))
        if deadline is not None and state.iterations % 256 == 0 and time.perf_counter() > deadline:
            return MembershipTag.TIME_LIMIT


def make_certificate(state: MembershipState, mode: PivotMode = PivotMode.STANDARD) -> WitnessCertificate:
    p, pp = state.p, state.p_prime
    d = p - pp
    gap = state.gap
    proj = float(d @ p)
    c_norm = float(np.linalg.norm(state.c))
    radius_bound = proj / c_norm if c_norm > 0.0 else math.inf
    separation = max(0.0, (proj - state.r * c_norm) / gap) if gap > 0 else 0.0
    if mode == PivotMode.STANDARD:
        lower = gap / 2
    else:
        # a strict-pivot failure need not be a witness; only the hyperplane bound holds
        lower = min(gap / 2, separation)
    return WitnessCertificate(
        p_prime=pp.copy(), x_prime=state.x_prime.copy(), gap=gap,
        delta_lower=lower, delta_upper=gap,
        radius_lower_bound=radius_bound, separation_bound=separation,
    )


def run_membership(A, b, r: float, epsilon: float, max_iters: Optional[int] = None,
                   pivot_mode: PivotMode | str = PivotMode.STANDARD,
                   trace: TraceSink = None, time_limit: Optional[float] = None) -> MembershipResult:
    """Decide whether `b` is within `epsilon` of ``{Ax : ||x|| <= r}``.

    Starts from ``x' = 0``. Returns a ``NearPoint`` result with
    ``||A x' - b|| <= epsilon``, a ``Witness`` result carrying a
    :class:`WitnessCertificate`, or ``IterationCapReached`` /
    ``TimeLimitReached`` with the last state when `max_iters` pivot steps or
    `time_limit` seconds did not settle the question.

    Parameters
    ----------
    A : (m, n) array
    b : (m,) array, nonzero
    r : float
        Radius of the ball whose image is tested.
    epsilon : float in (0, 1)
    max_iters : int, optional
        Defaults to ``100 * ceil((r ||A|| / epsilon)^2)``, at most 1e7.
    pivot_mode : {"standard", "strict"}
    trace : callable, optional
        Receives a :class:`TraceRecord` per step and one for the final event.
    time_limit : float, optional
        Wall-clock budget in seconds.
    """
    A = as_matrix(A)
    b = as_vector(b)
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    if not np.any(b):
        raise ValueError("b must be nonzero")
    if r <= 0:
        raise ValueError("r must be positive")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    mode = PivotMode(pivot_mode)
    if max_iters is None:
        max_iters = default_max_iters(r, operator_norm_estimate(A), epsilon)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")

    deadline = None if time_limit is None else time.perf_counter() + time_limit
    state = MembershipState.initial(A, b, r)
    tag = advance(A, state, epsilon, mode, pivot_slack(b), max_iters, trace, deadline)
    cert = make_certificate(state, mode) if tag == MembershipTag.WITNESS else None
    if trace is not None:
        event = {MembershipTag.NEAR_POINT: "near", MembershipTag.WITNESS: "witness",
                 MembershipTag.ITERATION_CAP: "cap", MembershipTag.TIME_LIMIT: "timeout"}[tag]
        trace(TraceRecord(state.iterations, state.gap, state.r, 0.0, event))
    return MembershipResult(tag=tag, state=state, certificate=cert)
