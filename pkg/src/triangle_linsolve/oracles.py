"""Slow reference computations for checking the iterative solvers.

Nothing in the solver path imports this module. Singular values come from a
one-sided (Hestenes) Jacobi SVD written here rather than LAPACK, so the
oracle shares no code with the generators' use of ``numpy.linalg``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import as_matrix, as_vector

__all__ = [
    "RANK_RTOL",
    "jacobi_svd",
    "numerical_rank",
    "least_squares_direct",
    "smallest_positive_singular_value",
    "EllipsoidProjection",
    "project_to_ellipsoid",
]

RANK_RTOL = 1e-12
MAX_SWEEPS = 60


def _round_robin(n: int):
    """Yield ``n - 1`` (or ``n``) rounds of disjoint index pairs covering every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    for _ in range(k - 1):
        pairs = [(players[i], players[k - 1 - i]) for i in range(k // 2)]
        pairs = [(min(i, j), max(i, j)) for i, j in pairs if i >= 0 and j >= 0]
        if pairs:
            I, J = zip(*pairs)
            yield np.array(I), np.array(J)
        players = [players[0], players[-1]] + players[1:-1]


def _jacobi_tall(G: np.ndarray):
    m, n = G.shape
    G = G.copy()
    V = np.eye(n)
    tol = max(m, n) * np.finfo(float).eps
    rounds = list(_round_robin(n))
    for _ in range(MAX_SWEEPS):
        rotated = False
        for I, J in rounds:
            gi, gj = G[:, I], G[:, J]
            alpha = np.einsum("ij,ij->j", gi, gi)
            beta = np.einsum("ij,ij->j", gj, gj)
            gamma = np.einsum("ij,ij->j", gi, gj)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            I, J = I[active], J[active]
            alpha, beta, gamma = alpha[active], beta[active], gamma[active]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = cs * t
            for M in (G, V):
                mi, mj = M[:, I].copy(), M[:, J]
                M[:, I] = cs * mi - sn * mj
                M[:, J] = sn * mi + cs * mj
        if not rotated:
            break
    s = np.linalg.norm(G, axis=0)
    order = np.argsort(-s, kind="stable")
    s, G, V = s[order], G[:, order], V[:, order]
    U = np.zeros_like(G)
    nz = s > 0
    U[:, nz] = G[:, nz] / s[nz]
    return U, s, V


def jacobi_svd(A):
    """Thin SVD ``A = U diag(s) V^T`` by one-sided Jacobi rotations.

    Returns ``U`` (m x k), ``s`` (k,) in descending order and ``V`` (n x k)
    with ``k = min(m, n)``. Columns of ``U`` for zero singular values are zero.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m >= n:
        return _jacobi_tall(A)
    U, s, V = _jacobi_tall(A.T)
    return V, s, U


def numerical_rank(s: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def least_squares_direct(A, b):
    """Minimum-norm least-squares solution and the residual norm ``min ||Ax - b||``.

    Singular values at or below ``1e-12 * s_max`` are treated as zero.
    """
    A = as_matrix(A)
    b = as_vector(b)
    U, s, V = jacobi_svd(A)
    k = numerical_rank(s)
    coeff = (U[:, :k].T @ b) / s[:k]
    x = V[:, :k] @ coeff
    return x, float(np.linalg.norm(A @ x - b))


def smallest_positive_singular_value(A) -> float:
    U, s, V = jacobi_svd(A)
    k = numerical_rank(s)
    if k == 0:
        raise ValueError("zero matrix has no positive singular value")
    return float(s[k - 1])


@dataclass(frozen=True)
class EllipsoidProjection:
    """Nearest point of ``{Ax : ||x|| <= r}`` to ``b``.

    ``delta_r = ||A x_opt - b||``; ``lam`` is the multiplier of the ball
    constraint (0 when it is inactive).
    """

    delta_r: float
    x_opt: np.ndarray
    lam: float


def project_to_ellipsoid(A, b, r: float, rtol: float = 1e-10, max_bisect: int = 400) -> EllipsoidProjection:
    """Solve ``min ||Ax - b||`` subject to ``||x|| <= r``.

    If the minimum-norm least-squares solution fits in the ball it is the
    answer; otherwise the multiplier ``lam`` of
    ``(A^T A + lam I) x = A^T b`` is bisected until ``||x(lam)|| = r``
    to relative accuracy `rtol`, each trial solved by Cholesky.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    A = as_matrix(A)
    b = as_vector(b)
    x_hat, delta = least_squares_direct(A, b)
    if np.linalg.norm(x_hat) <= r:
        return EllipsoidProjection(delta_r=delta, x_opt=x_hat, lam=0.0)

    gram = A.T @ A
    atb = b @ A
    eye = np.eye(A.shape[1])

    def x_of(lam):
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram + lam * eye), atb)

    lo, hi = 0.0, float(np.linalg.norm(atb)) / r
    x_hi = x_of(hi)
    if np.linalg.norm(x_hi) > r * (1 + rtol):
        raise RuntimeError("failed to bracket the ball multiplier")
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        x_mid = x_of(mid)
        norm_mid = np.linalg.norm(x_mid)
        if norm_mid > r:
            lo = mid
        else:
            hi, x_hi = mid, x_mid
        if abs(np.linalg.norm(x_hi) - r) <= rtol * r:
            break
    return EllipsoidProjection(delta_r=float(np.linalg.norm(A @ x_hi - b)), x_opt=x_hi, lam=hi)
