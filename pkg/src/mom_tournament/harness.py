"""Monte Carlo experiment engine.

A trial draws one dataset from its own RNG stream (``stream_id`` = trial
index), builds the candidate pool from an independent substream and runs
every requested method for every ``r`` multiplier. Trials run on a thread
pool; results are sorted by ``(trial, r index, method)`` so the output does
not depend on scheduling.
"""

from __future__ import annotations

import configparser
import dataclasses
import enum
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import erm_least_squares, mom_risk_minimizer
from .candidates import Norm, PoolSpec, Strategy, build_pool
from .core import (
    Fallback,
    InvalidArgumentError,
    RngSpec,
    TieBreak,
    TournamentConfig,
    TournamentError,
)
from .datagen import Design, Noise, ProblemSpec, generate, true_excess_risk, true_l2_error
from .theory import rate_full_space
from .tournament import run_tournament

log = logging.getLogger(__name__)


class Method(enum.Enum):
    TOURNAMENT = "Tournament"
    ERM_LS = "ErmLS"
    MOM_RISK_MIN = "MomRiskMin"


_METHOD_ALIASES = {
    "tournament": Method.TOURNAMENT,
    "erm": Method.ERM_LS,
    "ermls": Method.ERM_LS,
    "mom_risk": Method.MOM_RISK_MIN,
    "momriskmin": Method.MOM_RISK_MIN,
}


@dataclass(frozen=True)
class TournamentSettings:
    """Tournament tunables apart from ``r`` and ``sigma``, which are set per trial."""

    alpha: float = 0.5
    beta: float = 2.0
    ell: int = 8
    theta: float = 0.1
    tau: float = 0.2
    tie_break: TieBreak = TieBreak.MIN_MOM_RISK
    fallback: Fallback = Fallback.COPELAND

    def config(self, r: float, sigma: float) -> TournamentConfig:
        return TournamentConfig(
            r, sigma, self.alpha, self.beta, self.ell, self.theta, self.tau,
            self.tie_break, self.fallback,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    tournament: TournamentSettings
    pool: PoolSpec
    methods: tuple[Method, ...] = (Method.TOURNAMENT, Method.ERM_LS)
    n_trials: int = 100
    base_seed: int = 0
    r_multipliers: tuple[float, ...] = (1.0,)
    output_path: str = "results.csv"
    # "theory": r = mult * sigma * sqrt(n_dim / N); "sigma": r = mult * sigma
    r_reference: str = "theory"
    # "t0", "erm" (least squares on part 1) or "fixed" (pool.center as given)
    pool_center: str = "t0"
    # pool radius in units of r ("r") or absolute ("abs")
    pool_radius_units: str = "r"
    sigma_inflate: float = 1.0
    threads: int = 1
    timing: bool = True
    # calibrate-oracle settings
    calib_ell_grid: tuple[int, ...] = (1, 2, 4, 8, 16)
    calib_pairs: int = 20
    calib_reps: int = 100
    calib_confidence: float = 0.99

    def __post_init__(self):
        if self.n_trials < 1:
            raise InvalidArgumentError("n_trials must be at least 1")
        if not self.methods:
            raise InvalidArgumentError("at least one method is required")
        if not self.r_multipliers or min(self.r_multipliers) <= 0:
            raise InvalidArgumentError("r_multipliers must be positive")
        if self.r_reference not in ("theory", "sigma"):
            raise InvalidArgumentError(f"unknown r_reference {self.r_reference!r}")
        if self.pool_center not in ("t0", "erm", "fixed"):
            raise InvalidArgumentError(f"unknown pool_center {self.pool_center!r}")
        if self.pool_radius_units not in ("r", "abs"):
            raise InvalidArgumentError(f"unknown pool_radius_units {self.pool_radius_units!r}")
        if not self.sigma_inflate > 0:
            raise InvalidArgumentError("sigma_inflate must be positive")

    @property
    def sigma(self) -> float:
        """Noise scale handed to the tournament."""
        return self.problem.sigma * self.sigma_inflate

    def r_values(self) -> list[float]:
        p = self.problem
        sigma = p.sigma if p.sigma > 0 else 1.0
        if self.r_reference == "sigma":
            base = sigma
        else:
            base = rate_full_space(p.n_dim, p.n_per_part, sigma).r_star
        return [m * base for m in self.r_multipliers]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    method: str
    r_used: float
    error_l2: float
    excess_risk: float
    qualifier_count: int
    fallback_used: int
    runtime_ms: float
    seed: int
    stream_id: int

    @property
    def failed(self) -> bool:
        return math.isnan(self.error_l2)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _t0(text: str, n_dim: int) -> np.ndarray:
    text = text.strip().lower()
    if text == "e1":
        t = np.zeros(n_dim)
        t[0] = 1.0
        return t
    if text == "ones":
        return np.ones(n_dim)
    if text == "zeros":
        return np.zeros(n_dim)
    vals = np.array(_floats(text))
    if vals.shape != (n_dim,):
        raise InvalidArgumentError(f"t0 has {vals.size} entries, n_dim is {n_dim}")
    return vals


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InvalidArgumentError(f"not a boolean: {text!r}")


KNOWN_KEYS = {
    "n_dim", "n_per_part", "design", "design_dof", "noise", "noise_param", "sigma", "t0",
    "alpha", "beta", "ell", "theta", "tau", "tie_break", "fallback",
    "pool_strategy", "pool_center", "pool_radius", "pool_radius_units", "pool_count",
    "pool_mesh", "pool_norm", "pool_include_center", "pool_shells", "pool_points",
    "methods", "n_trials", "base_seed", "r_multipliers", "r_reference", "output_path",
    "sigma_inflate", "threads", "timing",
    "calib_ell_grid", "calib_pairs", "calib_reps", "calib_confidence",
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` format (``#`` starts a comment)."""
    cp = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",), interpolation=None
    )
    cp.read_string("[experiment]\n" + text)
    kv = dict(cp["experiment"])
    unknown = set(kv) - KNOWN_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
    return config_from_mapping(kv)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def config_from_mapping(kv: dict) -> ExperimentConfig:
    g = kv.get
    n_dim = int(g("n_dim", 5))
    design = Design(g("design", "gaussian"))
    noise = Noise(g("noise", "gaussian"))
    problem = ProblemSpec(
        n_dim=n_dim,
        n_per_part=int(g("n_per_part", 1000)),
        t0=_t0(g("t0", "e1"), n_dim),
        design=design,
        noise=noise,
        sigma=float(g("sigma", 1.0)),
        design_dof=float(g("design_dof")) if g("design_dof") else None,
        noise_param=float(g("noise_param")) if g("noise_param") else None,
    )
    settings = TournamentSettings(
        alpha=float(g("alpha", 0.5)),
        beta=float(g("beta", 2.0)),
        ell=int(g("ell", 8)),
        theta=float(g("theta", 0.1)),
        tau=float(g("tau", 0.2)),
        tie_break=TieBreak(g("tie_break", "min_mom_risk")),
        fallback=Fallback(g("fallback", "copeland")),
    )
    strategy = Strategy(g("pool_strategy", "shells"))
    mesh_or_count = float(g("pool_mesh", 0.5)) if strategy is Strategy.GRID_NET else int(
        g("pool_count", 10)
    )
    points = None
    if g("pool_points"):
        points = np.array([_floats(row) for row in g("pool_points").split("|") if row.strip()])
    center_txt = g("pool_center", "t0").strip().lower()
    if center_txt in ("t0", "erm"):
        center, center_mode = problem.t0, center_txt
    else:
        center, center_mode = _t0(center_txt, n_dim), "fixed"
    pool = PoolSpec(
        strategy=strategy,
        center=center,
        radius=float(g("pool_radius", 1.0)),
        mesh_or_count=mesh_or_count,
        norm=Norm(g("pool_norm", "l2")),
        include_center=_bool(g("pool_include_center", "true")),
        points=points,
        shells=_floats(g("pool_shells", "0.5,1,2,8")),
    )
    methods = tuple(
        _METHOD_ALIASES[m.strip().lower()] if m.strip().lower() in _METHOD_ALIASES
        else Method(m.strip())
        for m in g("methods", "tournament,erm").split(",")
        if m.strip()
    )
    return ExperimentConfig(
        problem=problem,
        tournament=settings,
        pool=pool,
        methods=methods,
        n_trials=int(g("n_trials", 100)),
        base_seed=int(g("base_seed", 0)),
        r_multipliers=_floats(g("r_multipliers", "1.0")),
        output_path=g("output_path", "results.csv"),
        r_reference=g("r_reference", "theory"),
        pool_center=center_mode,
        pool_radius_units=g("pool_radius_units", "r"),
        sigma_inflate=float(g("sigma_inflate", 1.0)),
        threads=int(g("threads", 1)),
        timing=_bool(g("timing", "true")),
        calib_ell_grid=tuple(int(x) for x in _floats(g("calib_ell_grid", "1,2,4,8,16"))),
        calib_pairs=int(g("calib_pairs", 20)),
        calib_reps=int(g("calib_reps", 100)),
        calib_confidence=float(g("calib_confidence", 0.99)),
    )


# ---------------------------------------------------------------------------
# Trials
# ---------------------------------------------------------------------------


def _pool_for(config: ExperimentConfig, dataset, r: float, rng: np.random.Generator):
    spec = config.pool
    if config.pool_center == "t0":
        spec = spec.with_center(config.problem.t0)
    elif config.pool_center == "erm":
        spec = spec.with_center(erm_least_squares(dataset, parts=(0,)).coeffs)
    if config.pool_radius_units == "r" and spec.strategy is not Strategy.EXPLICIT:
        spec = dataclasses.replace(spec, radius=spec.radius * r)
        if spec.strategy is Strategy.GRID_NET:
            spec = dataclasses.replace(spec, mesh_or_count=spec.mesh_or_count * r)
    return build_pool(spec, config.problem.n_dim, rng)


def run_trial(config: ExperimentConfig, trial: int) -> list[TrialResult]:
    """All methods and r values for one trial."""
    rspec = RngSpec(config.base_seed, trial)
    problem = config.problem
    seed, stream = config.base_seed, trial
    rows = []

    def row(method, r, est=None, q=0, fb=0):
        if est is None:
            err = exc = math.nan
        else:
            err = true_l2_error(est, problem)
            exc = true_excess_risk(est, problem)
        return TrialResult(trial, method.value, r, err, exc, q, fb, 0.0, seed, stream)

    try:
        dataset = generate(problem, rspec)
    except TournamentError as e:
        log.warning("trial %d: data generation failed: %s", trial, e)
        return [row(m, r) for r in config.r_values() for m in config.methods]

    for ri, r in enumerate(config.r_values()):
        pool = None
        for method in config.methods:
            t_start = time.perf_counter()
            try:
                if method is Method.ERM_LS:
                    rows.append(row(method, r, erm_least_squares(dataset)))
                else:
                    if pool is None:
                        pool = _pool_for(config, dataset, r, rspec.generator(1 + ri))
                    if method is Method.TOURNAMENT:
                        cfg = config.tournament.config(r, config.sigma)
                        out = run_tournament(dataset, pool, cfg)
                        est = out.champion
                        q, fb = len(out.qualifiers.ids), int(out.result.fallback_used)
                    else:
                        est = mom_risk_minimizer(pool, dataset, config.tournament.ell)
                        q, fb = 0, 0
                    rows.append(row(method, r, est, q, fb))
            except TournamentError as e:
                log.warning("trial %d, %s: %s", trial, method.value, e)
                rows.append(row(method, r))
                continue
            if config.timing:
                ms = (time.perf_counter() - t_start) * 1e3
                rows[-1] = dataclasses.replace(rows[-1], runtime_ms=ms)
    return rows


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> list[TrialResult]:
    threads = threads or config.threads
    trials = range(config.n_trials)
    if config.pool_center == "t0" and config.pool.include_center:
        log.info("pool includes t0 explicitly (pool_center = t0, include_center)")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            chunks = list(ex.map(lambda t: run_trial(config, t), trials))
    else:
        chunks = [run_trial(config, t) for t in trials]
    # rows inside a trial are already in (r index, method order)
    return [r for chunk in chunks for r in chunk]


def confidence_curve(
    results: Sequence[TrialResult], method: str, thresholds: Sequence[float]
) -> list[tuple[float, float]]:
    """Fraction of trials of ``method`` with ``error_l2 <= threshold``.

    Failed trials count as misses.
    """
    method = method.value if isinstance(method, Method) else method
    errs = np.array([r.error_l2 for r in results if r.method == method])
    if errs.size == 0:
        raise InvalidArgumentError(f"no results for method {method!r}")
    with np.errstate(invalid="ignore"):
        return [(float(t), float(np.mean(errs <= t))) for t in thresholds]


def calibrate_from_config(config: ExperimentConfig):
    """Calibrate the oracle constants on fresh designs of ``config.problem``.

    Draws ``calib_reps`` designs of ``n_per_part`` rows and ``calib_pairs``
    unit-distance pairs in random directions.
    """
    from .core import Candidate
    from .datagen import sample_design
    from .oracle import calibrate_oracle_constants

    gen = RngSpec(config.base_seed, 0).generator(1)
    p = config.problem
    designs = np.stack([sample_design(p, p.n_per_part, gen) for _ in range(config.calib_reps)])
    dirs = gen.standard_normal((config.calib_pairs, p.n_dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    zero = np.zeros(p.n_dim)
    pairs = [(Candidate(d, 1), Candidate(zero, 0)) for d in dirs]
    return calibrate_oracle_constants(
        designs, config.calib_ell_grid, pairs, config.calib_confidence
    )
