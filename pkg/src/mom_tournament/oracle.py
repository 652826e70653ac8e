"""The distance oracle.

``phi(f, h)`` is the median of means, over blocks of ``ell`` points of the
first sample part, of ``|f(X_i) - h(X_i)|``. A match between ``f`` and ``h``
is played only when ``phi(f, h) >= beta * r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .core import Candidate, InvalidArgumentError, TournamentConfig, _frozen


@dataclass(frozen=True, eq=False)
class OracleState:
    xs_part1: np.ndarray
    ell: int
    beta_r: float
    alpha: float
    beta: float

    def __post_init__(self):
        xs = _frozen(self.xs_part1, ndim=2)
        if self.ell < 1 or self.ell > xs.shape[0]:
            raise InvalidArgumentError(f"ell={self.ell} incompatible with {xs.shape[0]} rows")
        # keep only the prefix that Med_ell actually uses
        n_used = (xs.shape[0] // self.ell) * self.ell
        object.__setattr__(self, "xs_part1", xs[:n_used])
        if not self.beta_r > 0:
            raise InvalidArgumentError("beta_r must be positive")

    @classmethod
    def from_config(cls, xs_part1, config: TournamentConfig) -> "OracleState":
        return cls(xs_part1, config.ell, config.beta * config.r, config.alpha, config.beta)

    @property
    def r(self) -> float:
        return self.beta_r / self.beta

    def with_r(self, r: float) -> "OracleState":
        return OracleState(self.xs_part1, self.ell, self.beta * r, self.alpha, self.beta)


def phi(state: OracleState, f: Candidate, h: Candidate) -> float:
    if f.n_dim != state.xs_part1.shape[1] or h.n_dim != state.xs_part1.shape[1]:
        raise InvalidArgumentError(
            f"candidate dimensions ({f.n_dim}, {h.n_dim}) do not match the data "
            f"({state.xs_part1.shape[1]})"
        )
    v = np.abs(state.xs_part1 @ (f.coeffs - h.coeffs))
    return float(kernels.med_of_means(v, state.ell))


def do_decision(state: OracleState, f: Candidate, h: Candidate) -> int:
    return int(phi(state, f, h) >= state.beta_r)


def phi_matrix(state: OracleState, coeffs: np.ndarray) -> np.ndarray:
    """All-pairs ``phi`` for the rows of ``coeffs`` (fast path)."""
    pred = state.xs_part1 @ np.asarray(coeffs, dtype=np.float64).T
    return kernels.phi_matrix(pred, state.ell)


@dataclass(frozen=True)
class Calibration:
    alpha: float
    beta: float
    ell: int
    per_ell: dict  # ell -> (alpha, beta)

    @property
    def ratio(self) -> float:
        return self.beta / self.alpha

    def __iter__(self):
        return iter((self.alpha, self.beta, self.ell))


def _quad_norm(diffs, covariance):
    if covariance is None:
        return np.linalg.norm(diffs, axis=1)
    cov = np.asarray(covariance, dtype=np.float64)
    return np.sqrt(np.einsum("pi,ij,pj->p", diffs, cov, diffs))


def calibrate_oracle_constants(
    xs,
    ell_grid: Sequence[int],
    pair_sample: Sequence[tuple[Candidate, Candidate]],
    target_confidence: float,
    covariance=None,
) -> Calibration:
    """Empirical isomorphy constants of ``phi``.

    For each ``ell`` the ratios ``phi(f, h) / ||f - h||_{L2}`` are collected
    over every pair and every design in ``xs`` (an ``N x d`` matrix or a
    ``R x N x d`` stack of independent designs). ``alpha`` and ``beta`` are
    the lower and upper ``(1 - target_confidence) / 2`` empirical quantiles,
    so the two-sided sandwich ``alpha * d <= phi <= beta * d`` holds on at
    least a ``target_confidence`` fraction of the sample. The ``ell`` with the
    smallest ``beta / alpha`` is returned.

    True distances use isotropy (Euclidean norm of the coefficient
    difference) unless ``covariance`` is given.
    """
    ell_grid = [int(e) for e in ell_grid]
    if not ell_grid or not pair_sample:
        raise InvalidArgumentError("ell_grid and pair_sample must be nonempty")
    if not 0.5 < target_confidence < 1:
        raise InvalidArgumentError("target_confidence must lie in (0.5, 1)")
    designs = np.asarray(xs, dtype=np.float64)
    if designs.ndim == 2:
        designs = designs[None]
    if designs.ndim != 3:
        raise InvalidArgumentError("xs must be N x d or R x N x d")

    diffs = np.stack([f.coeffs - h.coeffs for f, h in pair_sample])
    dist = _quad_norm(diffs, covariance)
    if np.any(dist <= 0):
        raise InvalidArgumentError("pair_sample contains a pair at zero distance")

    tail = (1 - target_confidence) / 2
    per_ell = {}
    for ell in ell_grid:
        if ell < 1 or ell > designs.shape[1]:
            raise InvalidArgumentError(f"ell={ell} incompatible with N={designs.shape[1]}")
        ratios = []
        for X in designs:
            proj = np.abs(X @ diffs.T)
            ratios.append(kernels.column_med_of_means(proj, ell) / dist)
        ratios = np.concatenate(ratios)
        a = float(np.quantile(ratios, tail, method="inverted_cdf"))
        b = float(np.quantile(ratios, 1 - tail, method="inverted_cdf"))
        per_ell[ell] = (a, b)
    best = min(ell_grid, key=lambda e: (per_ell[e][1] / per_ell[e][0], e))
    a, b = per_ell[best]
    return Calibration(a, b, best, per_ell)
