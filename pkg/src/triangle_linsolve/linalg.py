"""Dense linear-algebra kernels shared by the solver, baselines and generators.

Matrices are plain C-ordered ``float64`` numpy arrays; the helpers here only
validate and normalize them.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.io

__all__ = [
    "as_matrix",
    "as_vector",
    "matvec",
    "transpose_matvec",
    "operator_norm_estimate",
    "random_orthogonal",
    "read_matrix_market",
    "write_matrix_market",
    "read_vector",
    "write_vector",
]


def as_matrix(A) -> np.ndarray:
    """Return `A` as a row-major float64 matrix, rejecting NaN/Inf and empty shapes."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Compute ``A @ x``."""
    if x.shape != (A.shape[1],):
        raise ValueError(f"cannot apply {A.shape} matrix to vector of shape {x.shape}")
    return A @ x


def transpose_matvec(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Compute ``A.T @ y`` without forming the transpose."""
    if y.shape != (A.shape[0],):
        raise ValueError(f"cannot apply transpose of {A.shape} matrix to vector of shape {y.shape}")
    return y @ A


def operator_norm_estimate(A: np.ndarray, tol: float = 1e-6, max_iter: int = 200, seed: int = 0) -> float:
    """Estimate the spectral norm of `A` by power iteration on ``A.T @ A``.

    The returned value is a Rayleigh-type lower bound ``||A v||`` for a unit
    vector ``v``; iteration stops once successive estimates agree to a relative
    `tol` or after `max_iter` steps. A zero matrix gives 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_matrix(A)
    if not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        Av = A @ v
        new_sigma = float(np.linalg.norm(Av))
        w = Av @ A
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            # v landed in the null space; restart from a fresh direction
            v = rng.standard_normal(A.shape[1])
            v /= np.linalg.norm(v)
            continue
        v = w / w_norm
        if new_sigma > 0 and abs(new_sigma - sigma) <= tol * new_sigma:
            sigma = new_sigma
            break
        sigma = new_sigma
    return max(sigma, float(np.linalg.norm(A @ v)))


def random_orthogonal(k: int, seed: int) -> np.ndarray:
    """Haar-distributed ``k x k`` orthogonal matrix from a seeded Gaussian draw.

    Householder QR (LAPACK ``geqrf``) of a standard normal matrix, with the
    column signs fixed by ``diag(R)`` so the result depends only on the seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((k, k))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return np.ascontiguousarray(Q * signs)


def read_matrix_market(path: str | os.PathLike) -> np.ndarray:
    """Read a dense matrix from a Matrix Market file (array or coordinate)."""
    data = scipy.io.mmread(os.fspath(path))
    if hasattr(data, "toarray"):
        data = data.toarray()
    return as_matrix(data)


def write_matrix_market(path: str | os.PathLike, A: np.ndarray, comment: str = "") -> None:
    """Write `A` in ``%%MatrixMarket matrix array real general`` form."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    scipy.io.mmwrite(os.fspath(path), A, comment=comment, field="real", symmetry="general")


def read_vector(path: str | os.PathLike) -> np.ndarray:
    return as_vector(read_matrix_market(path))


def write_vector(path: str | os.PathLike, x: np.ndarray, comment: str = "") -> None:
    """Write a vector as a one-column Matrix Market array."""
    write_matrix_market(path, as_vector(x)[:, None], comment=comment)
