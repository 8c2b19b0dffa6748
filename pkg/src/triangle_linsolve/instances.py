"""Seeded random test systems: dense general, low-rank and ill-conditioned.

Low-rank and ill-conditioned matrices are assembled as ``U diag(s) V^T`` with
Haar orthogonal factors and the singular values ``s`` of a freshly drawn
general matrix, after replacing the smallest half of ``s`` by 0 or 1e-3.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .linalg import random_orthogonal, write_matrix_market, write_vector

__all__ = ["Kind", "Distribution", "InstanceSpec", "Instance", "generate", "export_instance"]

ILL_CONDITIONED_VALUE = 1e-3


class Kind(str, enum.Enum):
    GENERAL_UNIFORM = "GeneralUniform"
    GENERAL_GAUSSIAN = "GeneralGaussian"
    LOW_RANK = "LowRank"
    ILL_CONDITIONED = "IllConditioned"


class Distribution(str, enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for one random system.

    ``distribution`` is the scalar law used for the base matrix and for
    ``x_true`` of the low-rank and ill-conditioned kinds (the general kinds
    fix it by name). Inconsistent systems add a vector of norm
    ``inconsistency`` orthogonal to the range of ``A``.
    """

    kind: Kind
    m: int
    n: int
    seed: int
    consistent: bool = True
    distribution: Distribution = Distribution.UNIFORM
    inconsistency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if self.kind in (Kind.LOW_RANK, Kind.ILL_CONDITIONED) and min(self.m, self.n) < 2:
            raise ValueError(f"{self.kind.value} needs min(m, n) >= 2")
        if not self.consistent and self.inconsistency <= 0:
            raise ValueError("inconsistency must be positive")

    @property
    def scalar_distribution(self) -> Distribution:
        if self.kind == Kind.GENERAL_UNIFORM:
            return Distribution.UNIFORM
        if self.kind == Kind.GENERAL_GAUSSIAN:
            return Distribution.GAUSSIAN
        return self.distribution

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["distribution"] = self.distribution.value
        return d


@dataclass
class Instance:
    spec: InstanceSpec
    A: np.ndarray
    b: np.ndarray
    x_true: Optional[np.ndarray]
    rank: int


def _draw(rng: np.random.Generator, dist: Distribution, shape) -> np.ndarray:
    if dist == Distribution.UNIFORM:
        return rng.uniform(0.0, 1.0, size=shape)
    return rng.standard_normal(shape)


def generate(spec: InstanceSpec) -> Instance:
    """Build the system described by `spec`; identical specs give identical arrays."""
    m, n = spec.m, spec.n
    k = min(m, n)
    dist = spec.scalar_distribution
    seeds = np.random.SeedSequence(spec.seed).generate_state(4, dtype=np.uint64)
    rng = np.random.default_rng(int(seeds[0]))
    base = _draw(rng, dist, (m, n))

    U = None
    if spec.kind in (Kind.GENERAL_UNIFORM, Kind.GENERAL_GAUSSIAN):
        A = np.ascontiguousarray(base)
        rank = k
    else:
        s = np.linalg.svd(base, compute_uv=False)
        cut = math.ceil(k / 2)
        if spec.kind == Kind.LOW_RANK:
            s[k - cut:] = 0.0
            rank = k - cut
        else:
            s[k - cut:] = ILL_CONDITIONED_VALUE
            rank = k
        U = random_orthogonal(m, int(seeds[1]))
        V = random_orthogonal(n, int(seeds[2]))
        A = np.ascontiguousarray((U[:, :k] * s) @ V[:, :k].T)

    x_true = _draw(rng, dist, n)
    b = A @ x_true
    if not spec.consistent:
        if rank >= m:
            raise ValueError(f"{spec.kind.value} {m}x{n} has full row rank; no inconsistent right-hand side exists")
        if U is None:
            # general m > n: the complete QR gives the left null space
            Q, _ = np.linalg.qr(A, mode="complete")
            null_basis = Q[:, rank:]
        else:
            null_basis = U[:, rank:]
        z_rng = np.random.default_rng(int(seeds[3]))
        z = null_basis @ z_rng.standard_normal(null_basis.shape[1])
        b = b + spec.inconsistency * z / np.linalg.norm(z)
    return Instance(spec=spec, A=A, b=b, x_true=x_true, rank=rank)


def export_instance(inst: Instance, prefix: str | os.PathLike) -> dict:
    """Write ``<prefix>_A.mtx``, ``<prefix>_b.mtx``, ``<prefix>_x.mtx`` and a JSON sidecar.

    Returns the mapping of written paths.
    """
    prefix = os.fspath(prefix)
    paths = {"A": f"{prefix}_A.mtx", "b": f"{prefix}_b.mtx", "meta": f"{prefix}.json"}
    write_matrix_market(paths["A"], inst.A)
    write_vector(paths["b"], inst.b)
    if inst.x_true is not None:
        paths["x_true"] = f"{prefix}_x.mtx"
        write_vector(paths["x_true"], inst.x_true)
    meta = {"spec": inst.spec.to_dict(), "rank": inst.rank, "files": paths}
    with open(paths["meta"], "w") as fh:
        json.dump(meta, fh, indent=2)
    return paths
