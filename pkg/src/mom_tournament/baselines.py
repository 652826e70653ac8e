"""Reference procedures: least squares and naive MoM-risk minimization."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from .core import Candidate, CandidatePool, Dataset, RankDeficientError
from .tournament import mom_squared_risk

DEFAULT_MAX_CONDITION = 1e12


def erm_least_squares(
    dataset: Dataset,
    parts: Sequence[int] = (0, 1, 2),
    max_condition: float = DEFAULT_MAX_CONDITION,
) -> Candidate:
    """Least-squares fit on the selected sample parts.

    Solves the normal equations with a Cholesky factorization after checking
    the condition number of the Gram matrix.
    """
    xs, ys = dataset.rows(parts)
    if xs.shape[0] < xs.shape[1]:
        raise RankDeficientError(
            f"{xs.shape[0]} rows cannot determine {xs.shape[1]} coefficients"
        )
    gram = xs.T @ xs
    eig = np.linalg.eigvalsh(gram)
    cond = eig[-1] / eig[0] if eig[0] > 0 else np.inf
    if cond > max_condition:
        raise RankDeficientError(
            f"Gram matrix condition number {cond:.3g} exceeds {max_condition:.3g}"
        )
    coeffs = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), xs.T @ ys)
    return Candidate(coeffs, 0)


def mom_risk_minimizer(pool: CandidatePool, dataset: Dataset, ell: int) -> Candidate:
    """Pool member with the smallest Med_ell of squared residuals on parts
    2 and 3. Lowest id wins ties."""
    xs, ys = dataset.rows((1, 2))
    risks = mom_squared_risk(pool.coeff_matrix, xs, ys, ell)
    return pool[int(np.argmin(risks))]
