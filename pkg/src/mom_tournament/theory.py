"""Closed-form accuracy scales and confidence levels.

The unknown absolute constants of the asymptotic statements are explicit
parameters defaulting to 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import InvalidArgumentError, OutOfRegimeError


class Regime(enum.Enum):
    FULL_SPACE_RN = "FullSpaceRn"
    L1_BALL_SMALL_N = "L1BallSmallN"
    L1_BALL_LARGE_N = "L1BallLargeN"
    L1_BALL_WIDTH_REGIMES = "L1BallWidthRegimes"


@dataclass(frozen=True)
class RatePrediction:
    r_star: float
    confidence_exponent: float
    regime: Regime
    # component values and which branch produced them, e.g. {"v_M_branch": "small_N"}
    detail: dict = field(default_factory=dict, compare=False)


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise InvalidArgumentError(f"{k} must be positive, got {v}")


def rate_full_space(n_dim: int, N: int, sigma: float) -> RatePrediction:
    """Accuracy scale ``sigma * sqrt(n_dim / N)`` for regression over all of
    R^n, attained with confidence ``1 - 2 exp(-c n_dim)``."""
    _positive(n_dim=n_dim, N=N, sigma=sigma)
    if N < n_dim:
        raise OutOfRegimeError(f"N={N} < n_dim={n_dim}: no nontrivial estimate")
    return RatePrediction(sigma * math.sqrt(n_dim / N), float(n_dim), Regime.FULL_SPACE_RN)


def mean_width_sparse_intersection(s: float, n_dim: int) -> float:
    """``sqrt(s * ln(e * n_dim / s))``, the Gaussian mean width of
    ``sqrt(s) B_1^n  intersected with  B_2^n`` up to absolute constants."""
    if not 1 <= s <= n_dim:
        raise OutOfRegimeError(f"s={s} outside [1, n_dim={n_dim}]")
    return math.sqrt(s * math.log(math.e * n_dim / s))


def rate_l1_ball(
    rho: float,
    sigma: float,
    N: int,
    n_dim: int,
    c1: float = 1.0,
    c2: float = 1.0,
) -> RatePrediction:
    """Accuracy scale ``max(v_Q, v_M)`` for regression in ``rho * B_1^n``.

    ``v_M**2`` is ``(rho sigma / sqrt N) sqrt(ln(2 c1 n sigma / (sqrt(N) rho)))``
    when ``N <= c1 n**2 sigma**2 / rho**2`` and ``sigma**2 n / N`` otherwise;
    ``v_Q**2`` is ``(rho**2 / N) ln(2 c2 n / N)`` when ``N <= c2 n`` and 0
    otherwise.
    """
    _positive(rho=rho, sigma=sigma, N=N, n_dim=n_dim, c1=c1, c2=c2)
    n = n_dim
    sqrtN = math.sqrt(N)
    detail = {}
    if N <= c1 * n * n * sigma * sigma / (rho * rho):
        arg = 2 * c1 * n * sigma / (sqrtN * rho)
        if arg <= 1:
            raise OutOfRegimeError(f"v_M logarithm argument {arg} <= 1")
        vm2 = (rho * sigma / sqrtN) * math.sqrt(math.log(arg))
        detail["v_M_branch"] = "small_N"
    else:
        vm2 = sigma * sigma * n / N
        detail["v_M_branch"] = "large_N"
    if N <= c2 * n:
        arg = 2 * c2 * n / N
        if arg <= 1:
            raise OutOfRegimeError(f"v_Q logarithm argument {arg} <= 1")
        vq2 = (rho * rho / N) * math.log(arg)
        detail["v_Q_branch"] = "small_N"
    else:
        vq2 = 0.0
        detail["v_Q_branch"] = "large_N"
    v_q, v_m = math.sqrt(vq2), math.sqrt(vm2)
    detail.update(v_Q=v_q, v_M=v_m, v_Q_sq=vq2, v_M_sq=vm2)
    small = {detail["v_M_branch"], detail["v_Q_branch"]} == {"small_N"}
    large = {detail["v_M_branch"], detail["v_Q_branch"]} == {"large_N"}
    if small:
        regime = Regime.L1_BALL_SMALL_N
    elif large:
        regime = Regime.L1_BALL_LARGE_N
    else:
        regime = Regime.L1_BALL_WIDTH_REGIMES
    r_star = max(v_q, v_m)
    exponent = N * min(1.0, r_star**2 / sigma**2)
    return RatePrediction(r_star, exponent, regime, detail)


def predicted_confidence(N: int, r: float, sigma: float, c0: float = 1.0) -> float:
    """``1 - exp(-c0 * N * min(1, r**2 / sigma**2))``."""
    _positive(N=N, r=r, sigma=sigma, c0=c0)
    return -math.expm1(-c0 * N * min(1.0, r * r / (sigma * sigma)))
