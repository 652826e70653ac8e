"""Scalar median-of-means estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import InvalidArgumentError, make_block_partition


@dataclass(frozen=True, eq=False)
class MomEstimate:
    value: float
    block_means: np.ndarray
    delta: float | None = None
    bound_radius: float | None = None


def _as_values(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidArgumentError("values must be a 1-d vector")
    return v


def med_of_means(values, ell: int) -> MomEstimate:
    """Median of the means of consecutive blocks of ``ell`` values.

    ``floor(len(values) / ell)`` blocks are used and the tail is dropped.
    With an even number of blocks the lower of the two middle means is
    returned.

    >>> med_of_means([0, 0, 100, 0, 0, 0], 2).value
    0.0
    """
    v = _as_values(values)
    if v.size == 0 or ell < 1 or ell > v.size:
        raise InvalidArgumentError(
            f"need 1 <= ell <= len(values), got ell={ell}, len={v.size}"
        )
    part = make_block_partition(v.size, v.size // ell)
    means = kernels.block_means(v[: part.n_used], part.block_size)
    k = means.size
    value = float(np.partition(means, (k - 1) // 2)[(k - 1) // 2])
    means.setflags(write=False)
    return MomEstimate(value, means)


def deviation_radius(variance: float, N: int, delta: float) -> float:
    """Radius ``2e * sqrt(2 var) * sqrt((1 + ln(1/delta)) / N)``.

    The median-of-means estimate with ``ceil(ln(1/delta))`` blocks misses the
    mean by more than this with probability at most ``delta``.
    """
    if not variance > 0:
        raise InvalidArgumentError(f"variance must be positive, got {variance}")
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    if not 0 < delta < 1:
        raise InvalidArgumentError(f"delta must lie in (0, 1), got {delta}")
    return 2 * math.e * math.sqrt(2 * variance) * math.sqrt((1 + math.log(1 / delta)) / N)


def mom_mean_estimator(values, delta: float, variance: float | None = None) -> MomEstimate:
    """Confidence-``delta`` median-of-means estimate of the mean.

    Uses ``ceil(ln(1/delta))`` blocks. ``delta`` must lie in
    ``[exp(1 - N/2), 1)`` and ``N >= 4``. When ``variance`` is given the
    matching deviation radius is attached to the result.
    """
    v = _as_values(values)
    N = v.size
    if N < 4:
        raise InvalidArgumentError(f"need at least 4 values, got {N}")
    if not math.exp(1 - N / 2) <= delta < 1:
        raise InvalidArgumentError(
            f"delta={delta} outside the admissible range [exp(1 - N/2), 1)"
        )
    n_blocks = max(1, math.ceil(math.log(1 / delta)))
    part = make_block_partition(N, n_blocks)
    est = med_of_means(v[: part.n_used], part.block_size)
    radius = None if variance is None else deviation_radius(variance, N, delta)
    return MomEstimate(est.value, est.block_means, delta, radius)
