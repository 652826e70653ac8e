"""Shared domain types, configuration and block partitioning.

Everything here is immutable after construction. Arrays stored on the
dataclasses are marked read-only so that they can be shared between
threads without copies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class TournamentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(TournamentError, ValueError):
    pass


class InvalidStateError(TournamentError, RuntimeError):
    pass


class OutOfRegimeError(TournamentError, ValueError):
    """A closed-form rate was evaluated outside its stated validity range."""


class RankDeficientError(TournamentError, np.linalg.LinAlgError):
    pass


class NoChampionError(TournamentError, RuntimeError):
    pass


class UnsupportedError(TournamentError, NotImplementedError):
    pass


def _frozen(a, dtype=np.float64, ndim=None):
    arr = np.array(a, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise InvalidArgumentError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labelled sample of ``3 * n_per_part`` rows split into three fixed parts.

    Part ``k`` (0, 1 or 2) is the row range ``[k*N, (k+1)*N)``. Part 0 only
    feeds the distance oracle, part 1 the preliminary round and part 2 the
    champions league.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _frozen(self.xs)
        if xs.ndim == 1:
            xs = _frozen(xs.reshape(-1, 1))
        ys = _frozen(self.ys, ndim=1)
        if xs.ndim != 2:
            raise InvalidArgumentError("xs must be a 2-d matrix")
        if xs.shape[0] != ys.shape[0]:
            raise InvalidArgumentError(
                f"xs has {xs.shape[0]} rows but ys has {ys.shape[0]} entries"
            )
        if xs.shape[0] == 0 or xs.shape[0] % 3:
            raise InvalidArgumentError("row count must be a positive multiple of 3")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidArgumentError("dataset contains NaN or Inf")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n_per_part(self) -> int:
        return self.xs.shape[0] // 3

    @property
    def n_dim(self) -> int:
        return self.xs.shape[1]

    def part(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(xs, ys)`` views of sample part ``k``."""
        if k not in (0, 1, 2):
            raise InvalidArgumentError(f"part index must be 0, 1 or 2, got {k}")
        n = self.n_per_part
        sl = slice(k * n, (k + 1) * n)
        return self.xs[sl], self.ys[sl]

    def rows(self, parts: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Stack the rows of the requested parts, in part order."""
        chunks = [self.part(k) for k in sorted(set(parts))]
        if not chunks:
            raise InvalidArgumentError("no parts selected")
        return (
            np.concatenate([c[0] for c in chunks]),
            np.concatenate([c[1] for c in chunks]),
        )


@dataclass(frozen=True)
class BlockPartition:
    """``n_blocks`` consecutive, equal-length index intervals."""

    n_blocks: int
    block_size: int

    @property
    def n_used(self) -> int:
        return self.n_blocks * self.block_size

    @property
    def index_ranges(self) -> list[range]:
        m = self.block_size
        return [range(j * m, (j + 1) * m) for j in range(self.n_blocks)]


def make_block_partition(n_available: int, n_blocks: int) -> BlockPartition:
    """Split ``range(n_available)`` into ``n_blocks`` consecutive blocks.

    Blocks have ``floor(n_available / n_blocks)`` indices each; the trailing
    remainder is discarded.
    """
    if n_blocks < 1 or n_blocks > n_available:
        raise InvalidArgumentError(
            f"need 1 <= n_blocks <= n_available, got n_blocks={n_blocks}, "
            f"n_available={n_available}"
        )
    return BlockPartition(int(n_blocks), int(n_available // n_blocks))


def choose_block_count(N: int, r: float, sigma: float, theta: float) -> int:
    """Number of tournament blocks, ``theta * N * min(1, (r/sigma)**2)``.

    Rounded half-up, clamped to ``[1, N]``.
    """
    if N <= 0 or r <= 0 or sigma <= 0:
        raise InvalidArgumentError("N, r and sigma must be positive")
    if not 0 < theta < 1:
        raise InvalidArgumentError(f"theta must lie in (0, 1), got {theta}")
    raw = theta * N * min(1.0, (r / sigma) ** 2)
    # absorb representation error such as 0.1*1000*0.01 = 1.0000000000000002
    n = math.floor(round(raw, 9) + 0.5)
    return int(min(N, max(1, n)))


# ---------------------------------------------------------------------------
# Candidates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Candidate:
    """The linear predictor ``x -> <coeffs, x>``."""

    coeffs: np.ndarray
    id: int = 0

    def __post_init__(self):
        c = _frozen(self.coeffs, ndim=1)
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("candidate coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_dim(self) -> int:
        return self.coeffs.shape[0]

    def predict(self, xs: np.ndarray) -> np.ndarray:
        if xs.shape[-1] != self.n_dim:
            raise InvalidArgumentError(
                f"candidate has dimension {self.n_dim}, data has {xs.shape[-1]}"
            )
        return xs @ self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Candidate):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.id, self.coeffs.tobytes()))


@dataclass(frozen=True, eq=False)
class CandidatePool:
    """Ordered, nonempty list of candidates with ids ``0..K-1``."""

    candidates: tuple[Candidate, ...]
    provenance: str = "explicit"

    def __post_init__(self):
        cands = tuple(self.candidates)
        if not cands:
            raise InvalidArgumentError("candidate pool must be nonempty")
        for i, c in enumerate(cands):
            if c.id != i:
                raise InvalidArgumentError(f"candidate at position {i} has id {c.id}")
        dims = {c.n_dim for c in cands}
        if len(dims) != 1:
            raise InvalidArgumentError(f"mixed candidate dimensions {sorted(dims)}")
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(
            self, "_coeffs", _frozen(np.stack([c.coeffs for c in cands]))
        )

    @classmethod
    def from_vectors(cls, vectors, provenance: str = "explicit") -> "CandidatePool":
        arr = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        return cls(tuple(Candidate(v, i) for i, v in enumerate(arr)), provenance)

    @property
    def coeff_matrix(self) -> np.ndarray:
        """``K x n_dim`` matrix whose row ``i`` is candidate ``i``."""
        return self._coeffs

    @property
    def n_dim(self) -> int:
        return self._coeffs.shape[1]

    def __len__(self):
        return len(self.candidates)

    def __getitem__(self, i) -> Candidate:
        return self.candidates[i]

    def __iter__(self):
        return iter(self.candidates)

    def __eq__(self, other):
        if not isinstance(other, CandidatePool):
            return NotImplemented
        return self.provenance == other.provenance and np.array_equal(
            self._coeffs, other._coeffs
        )


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class TieBreak(enum.Enum):
    MIN_MOM_RISK = "min_mom_risk"
    LOWEST_ID = "lowest_id"


class Fallback(enum.Enum):
    COPELAND = "copeland"
    FAIL = "fail"


@dataclass(frozen=True)
class TournamentConfig:
    """Tunables of the tournament.

    ``r`` is the target accuracy and ``sigma`` an upper bound on the
    L2 norm of the noise. ``alpha``/``beta`` are the oracle's isomorphy
    constants and ``ell`` its block size; ``theta`` scales the block count.
    """

    r: float
    sigma: float
    alpha: float = 0.5
    beta: float = 2.0
    ell: int = 8
    theta: float = 0.1
    tau: float = 0.2
    tie_break: TieBreak = TieBreak.MIN_MOM_RISK
    fallback: Fallback = Fallback.COPELAND

    def __post_init__(self):
        if not (self.r > 0 and self.sigma > 0):
            raise InvalidArgumentError("r and sigma must be positive")
        if not 0 < self.alpha < 1 < self.beta:
            raise InvalidArgumentError(
                f"need 0 < alpha < 1 < beta, got alpha={self.alpha}, beta={self.beta}"
            )
        if not 0 < self.theta <= self.tau < 0.25:
            raise InvalidArgumentError(
                f"need 0 < theta <= tau < 1/4, got theta={self.theta}, tau={self.tau}"
            )
        if int(self.ell) != self.ell or self.ell < 1:
            raise InvalidArgumentError(f"ell must be a positive integer, got {self.ell}")
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))
        object.__setattr__(self, "fallback", Fallback(self.fallback))

    @property
    def separation(self) -> float:
        """``beta / alpha``; qualifiers lie within ``separation * r`` of the best."""
        return self.beta / self.alpha

    @property
    def r1(self) -> float:
        return 2.0 * self.separation * self.r


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    """Key of a counter-based (Philox) stream.

    ``(seed, stream_id)`` is the Philox key, so distinct streams never
    overlap. ``substream`` jumps the counter by multiples of ``2**128``
    for independent draws that belong to the same trial.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= _U64:
                raise InvalidArgumentError(f"{name} must be an unsigned 64-bit integer")

    def generator(self, substream: int = 0) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        bitgen = np.random.Philox(key=key)
        if substream:
            bitgen = bitgen.jumped(substream)
        return np.random.Generator(bitgen)


__all__ = [
    "TournamentError",
    "InvalidArgumentError",
    "InvalidStateError",
    "OutOfRegimeError",
    "RankDeficientError",
    "NoChampionError",
    "UnsupportedError",
    "Dataset",
    "BlockPartition",
    "make_block_partition",
    "choose_block_count",
    "Candidate",
    "CandidatePool",
    "TieBreak",
    "Fallback",
    "TournamentConfig",
    "RngSpec",
]
