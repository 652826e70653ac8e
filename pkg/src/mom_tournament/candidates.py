"""Finite candidate pools and greedy packing counts."""

from __future__ import annotations

import enum
import io
import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    CandidatePool,
    InvalidArgumentError,
    RngSpec,
    UnsupportedError,
)

GRID_MAX_DIM = 3


class Strategy(enum.Enum):
    GRID_NET = "grid"
    RANDOM_BALL = "random_ball"
    SEEDED_PERTURBATION = "perturbation"
    EXPLICIT = "explicit"
    SHELLS = "shells"


class Norm(enum.Enum):
    L2 = "l2"
    L1 = "l1"


@dataclass(frozen=True, eq=False)
class PoolSpec:
    """How to build a pool.

    ``mesh_or_count`` is the lattice spacing for ``GRID_NET`` and the number
    of draws for the random strategies (per shell for ``SHELLS``).
    ``SHELLS`` places ``count`` random directions on each sphere of radius
    ``radius * s`` for ``s`` in ``shells`` around the center.
    """

    strategy: Strategy
    center: np.ndarray
    radius: float = 1.0
    mesh_or_count: float = 1
    norm: Norm = Norm.L2
    include_center: bool = False
    points: np.ndarray | None = None
    shells: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "norm", Norm(self.norm))
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if self.strategy is not Strategy.EXPLICIT and not self.radius > 0:
            raise InvalidArgumentError("radius must be positive")
        if self.strategy is Strategy.GRID_NET:
            if not 0 < self.mesh_or_count <= self.radius:
                raise InvalidArgumentError("grid mesh must lie in (0, radius]")
        elif self.strategy is not Strategy.EXPLICIT:
            if int(self.mesh_or_count) != self.mesh_or_count or self.mesh_or_count < 1:
                raise InvalidArgumentError("count must be a positive integer")
        if self.strategy is Strategy.EXPLICIT and self.points is None:
            raise InvalidArgumentError("explicit pools need points")
        if self.strategy is Strategy.SHELLS and not self.shells:
            raise InvalidArgumentError("shell pools need at least one shell")

    def with_center(self, center) -> "PoolSpec":
        return PoolSpec(
            self.strategy, center, self.radius, self.mesh_or_count, self.norm,
            self.include_center, self.points, self.shells,
        )


def _norm(v, norm):
    return np.abs(v).sum(axis=-1) if norm is Norm.L1 else np.linalg.norm(v, axis=-1)


def _grid(spec, n_dim):
    if n_dim > GRID_MAX_DIM:
        raise UnsupportedError(f"grid nets are limited to n_dim <= {GRID_MAX_DIM}")
    mesh = float(spec.mesh_or_count)
    steps = int(np.floor(spec.radius / mesh + 1e-9))
    axis = np.arange(-steps, steps + 1) * mesh
    offsets = np.array(list(itertools.product(axis, repeat=n_dim)), dtype=np.float64)
    keep = _norm(offsets, spec.norm) <= spec.radius * (1 + 1e-12)
    offsets = offsets[keep]
    if spec.include_center:
        offsets = offsets[np.any(offsets != 0, axis=1)]
    return spec.center + offsets


def _unit_directions(rng, count, n_dim):
    g = rng.standard_normal((count, n_dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _random_ball(spec, n_dim, rng):
    count = int(spec.mesh_or_count)
    if spec.norm is Norm.L2:
        radii = spec.radius * rng.random(count) ** (1.0 / n_dim)
        return spec.center + _unit_directions(rng, count, n_dim) * radii[:, None]
    # uniform in the cross-polytope: first n_dim coords of a flat Dirichlet(n_dim+1)
    e = rng.exponential(size=(count, n_dim + 1))
    simplex = e[:, :n_dim] / e.sum(axis=1, keepdims=True)
    signs = rng.choice([-1.0, 1.0], size=(count, n_dim))
    return spec.center + spec.radius * simplex * signs


def _shells(spec, n_dim, rng):
    count = int(spec.mesh_or_count)
    out = []
    for s in spec.shells:
        d = _unit_directions(rng, count, n_dim)
        if spec.norm is Norm.L1:
            d = d / np.abs(d).sum(axis=1, keepdims=True)
        out.append(spec.center + spec.radius * s * d)
    return np.concatenate(out)


def build_pool(spec: PoolSpec, n_dim: int, rng: RngSpec | np.random.Generator) -> CandidatePool:
    """Materialize ``spec`` as a candidate pool with ids in generation order."""
    if spec.center.shape != (n_dim,):
        raise InvalidArgumentError(
            f"center has shape {spec.center.shape}, expected ({n_dim},)"
        )
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    st = spec.strategy
    if st is Strategy.GRID_NET:
        pts = _grid(spec, n_dim)
    elif st is Strategy.RANDOM_BALL:
        pts = _random_ball(spec, n_dim, gen)
    elif st is Strategy.SEEDED_PERTURBATION:
        count = int(spec.mesh_or_count)
        pts = spec.center + spec.radius * gen.standard_normal((count, n_dim))
    elif st is Strategy.SHELLS:
        pts = _shells(spec, n_dim, gen)
    else:
        pts = np.atleast_2d(np.asarray(spec.points, dtype=np.float64))
        if pts.shape[1] != n_dim:
            raise InvalidArgumentError("explicit points have the wrong dimension")
    if spec.include_center:
        pts = np.vstack([spec.center[None], pts])
    return CandidatePool.from_vectors(pts, provenance=st.value)


def greedy_packing(points, eps: float) -> list[int]:
    """Indices kept by a sequential greedy scan: a point is kept when it is
    at Euclidean distance ``>= eps`` from every point kept so far."""
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return []
    if pts.ndim == 1:
        pts = pts[:, None]
    kept: list[int] = []
    kept_pts = np.empty((0, pts.shape[1]))
    for i, p in enumerate(pts):
        if kept and np.min(np.linalg.norm(kept_pts - p, axis=1)) < eps:
            continue
        kept.append(i)
        kept_pts = np.vstack([kept_pts, p])
    return kept


def greedy_packing_count(points, eps: float) -> int:
    """Size of a maximal eps-separated subset found greedily.

    A lower bound on the packing number of ``points`` at scale ``eps``.
    """
    return len(greedy_packing(points, eps))


def write_pool(pool: CandidatePool, fh: io.TextIOBase) -> None:
    """One candidate per line: id, then coefficients (17 significant digits)."""
    for c in pool:
        fh.write(" ".join([str(c.id)] + [f"{x:.17g}" for x in c.coeffs]) + "\n")


def read_pool(fh: io.TextIOBase, provenance: str = "file") -> CandidatePool:
    rows = []
    for ln in fh:
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        fields = ln.split()
        if int(fields[0]) != len(rows):
            raise InvalidArgumentError(f"pool file ids out of order at id {fields[0]}")
        rows.append([float(x) for x in fields[1:]])
    return CandidatePool.from_vectors(rows, provenance=provenance)
