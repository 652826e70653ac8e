"""Median-of-means tournaments for regression over finite pools."""

from .baselines import erm_least_squares, mom_risk_minimizer
from .candidates import PoolSpec, build_pool, greedy_packing_count
from .core import (
    Candidate,
    CandidatePool,
    Dataset,
    Fallback,
    RngSpec,
    TieBreak,
    TournamentConfig,
    TournamentError,
)
from .datagen import ProblemSpec, generate, true_excess_risk, true_l2_error
from .kernels import BACKEND
from .mom import deviation_radius, med_of_means, mom_mean_estimator
from .oracle import calibrate_oracle_constants
from .theory import predicted_confidence, rate_full_space, rate_l1_ball
from .tournament import run_tournament

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Candidate",
    "CandidatePool",
    "Dataset",
    "Fallback",
    "PoolSpec",
    "ProblemSpec",
    "RngSpec",
    "TieBreak",
    "TournamentConfig",
    "TournamentError",
    "build_pool",
    "calibrate_oracle_constants",
    "deviation_radius",
    "erm_least_squares",
    "generate",
    "greedy_packing_count",
    "med_of_means",
    "mom_mean_estimator",
    "mom_risk_minimizer",
    "predicted_confidence",
    "rate_full_space",
    "rate_l1_ball",
    "run_tournament",
    "true_excess_risk",
    "true_l2_error",
]
