"""Preliminary round, champions league and the full tournament.

Each operation exists in two forms: a per-pair reference that follows the
definitions literally (``block_stat_b``, ``play_match``, ``psi_block_stat``,
``home_match``) and an all-pairs fast path on top of :mod:`.kernels`. The
rounds use the fast path by default; ``fast=False`` replays them pair by pair.

Block convention: on block ``j`` the player with the strictly smaller
empirical squared loss takes the block, i.e. ``h`` beats ``f`` when
``B_{f,h}(j) > 0``. Blocks with ``B_{f,h}(j) == 0`` count for neither.
"""

from __future__ import annotations

import enum
import io
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .core import (
    BlockPartition,
    Candidate,
    CandidatePool,
    Dataset,
    Fallback,
    InvalidArgumentError,
    InvalidStateError,
    NoChampionError,
    TieBreak,
    TournamentConfig,
    choose_block_count,
    make_block_partition,
)
from .oracle import OracleState, do_decision, phi_matrix

log = logging.getLogger(__name__)


class Outcome(enum.Enum):
    F_WINS = "FWins"
    H_WINS = "HWins"
    DRAW = "Draw"
    ABANDONED = "Abandoned"


@dataclass(frozen=True)
class MatchRecord:
    f_id: int
    h_id: int
    outcome: Outcome
    blocks_won_f: int
    blocks_won_h: int
    n_blocks: int

    @classmethod
    def from_tally(cls, f_id, h_id, won_f, won_h, n_blocks) -> "MatchRecord":
        if 2 * won_f > n_blocks:
            outcome = Outcome.F_WINS
        elif 2 * won_h > n_blocks:
            outcome = Outcome.H_WINS
        else:
            outcome = Outcome.DRAW
        return cls(int(f_id), int(h_id), outcome, int(won_f), int(won_h), int(n_blocks))

    @classmethod
    def abandoned(cls, f_id, h_id, n_blocks) -> "MatchRecord":
        return cls(int(f_id), int(h_id), Outcome.ABANDONED, 0, 0, int(n_blocks))

    @property
    def loser(self) -> int | None:
        if self.outcome is Outcome.F_WINS:
            return self.h_id
        if self.outcome is Outcome.H_WINS:
            return self.f_id
        return None

    def mirrored(self) -> "MatchRecord":
        flip = {Outcome.F_WINS: Outcome.H_WINS, Outcome.H_WINS: Outcome.F_WINS}
        return MatchRecord(
            self.h_id,
            self.f_id,
            flip.get(self.outcome, self.outcome),
            self.blocks_won_h,
            self.blocks_won_f,
            self.n_blocks,
        )

    def to_line(self) -> str:
        return (
            f"{self.f_id},{self.h_id},{self.outcome.value},"
            f"{self.blocks_won_f},{self.blocks_won_h}"
        )

    @classmethod
    def from_line(cls, line: str, n_blocks: int) -> "MatchRecord":
        f_id, h_id, outcome, bf, bh = line.strip().split(",")
        return cls(int(f_id), int(h_id), Outcome(outcome), int(bf), int(bh), n_blocks)


def write_match_log(records: Iterable[MatchRecord], fh: io.TextIOBase) -> None:
    """One line per match: ``f_id,h_id,outcome,blocks_f,blocks_h``."""
    for rec in records:
        fh.write(rec.to_line() + "\n")


def read_match_log(fh: io.TextIOBase, n_blocks: int) -> list[MatchRecord]:
    return [MatchRecord.from_line(ln, n_blocks) for ln in fh if ln.strip()]


@dataclass(frozen=True)
class QualifierSet:
    ids: tuple[int, ...]
    round_log: tuple[MatchRecord, ...] = field(repr=False)


@dataclass(frozen=True)
class ChampionResult:
    winner_id: int
    home_match_log: tuple[MatchRecord, ...] = field(repr=False)
    fallback_used: bool = False
    champion_ids: tuple[int, ...] = ()


class TournamentOutcome(NamedTuple):
    champion: Candidate
    qualifiers: QualifierSet
    result: ChampionResult


# ---------------------------------------------------------------------------
# Preliminary round
# ---------------------------------------------------------------------------


def _block_rows(block: range, xs, ys):
    if len(block) == 0:
        raise InvalidArgumentError("empty block")
    if block.start < 0 or block.stop > len(ys):
        raise InvalidArgumentError(f"block {block} outside the sample part")
    sl = slice(block.start, block.stop)
    return xs[sl], ys[sl]


def block_stat_b(f: Candidate, h: Candidate, block: range, data_part2) -> float:
    """``(1/m) sum_{i in block} ((f(X_i) - Y_i)**2 - (h(X_i) - Y_i)**2)``."""
    xs, ys = _block_rows(block, *data_part2)
    rf = f.predict(xs) - ys
    rh = h.predict(xs) - ys
    return float(np.sum(rf * rf - rh * rh) / len(block))


def play_match(
    f: Candidate,
    h: Candidate,
    partition: BlockPartition,
    data_part2,
    oracle: OracleState,
    force_do: int | None = None,
) -> MatchRecord:
    """One preliminary-round match, refereed by the distance oracle.

    ``force_do`` overrides the oracle's decision (test hook).
    """
    n = partition.n_blocks
    go = do_decision(oracle, f, h) if force_do is None else int(force_do)
    if not go:
        return MatchRecord.abandoned(f.id, h.id, n)
    won_f = won_h = 0
    for block in partition.index_ranges:
        b = block_stat_b(f, h, block, data_part2)
        if b > 0:
            won_h += 1
        elif b < 0:
            won_f += 1
    return MatchRecord.from_tally(f.id, h.id, won_f, won_h, n)


def _qualifiers_from_log(ids, records) -> tuple[int, ...]:
    lost = {rec.loser for rec in records}
    return tuple(i for i in ids if i not in lost)


def preliminary_round(
    pool: CandidatePool,
    partition: BlockPartition,
    data_part2,
    oracle: OracleState,
    fast: bool = True,
    executor=None,
) -> QualifierSet:
    """Play every unordered pair once; qualifiers are those with no loss.

    Records are ordered by ``(f_id, h_id)`` with ``f_id < h_id``. With
    ``fast=False`` the matches are played one by one through
    :func:`play_match`, optionally mapped over ``executor``.
    """
    pairs = list(itertools.combinations(range(len(pool)), 2))
    if not fast:
        def play(p):
            return play_match(pool[p[0]], pool[p[1]], partition, data_part2, oracle)

        mapper = executor.map if executor is not None else map
        records = tuple(mapper(play, pairs))
    else:
        records = tuple(_fast_preliminary(pool, partition, data_part2, oracle, pairs))
    return QualifierSet(_qualifiers_from_log(range(len(pool)), records), records)


def _fast_preliminary(pool, partition, data_part2, oracle, pairs):
    n, m = partition.n_blocks, partition.block_size
    if len(pool) == 1:
        return []
    coeffs = pool.coeff_matrix
    go = phi_matrix(oracle, coeffs) >= oracle.beta_r
    xs, ys = data_part2
    pred = xs[: partition.n_used] @ coeffs.T
    wins = kernels.match_tallies(pred, ys[: partition.n_used], m, n)
    out = []
    for a, b in pairs:
        if go[a, b]:
            out.append(MatchRecord.from_tally(a, b, wins[a, b], wins[b, a], n))
        else:
            out.append(MatchRecord.abandoned(a, b, n))
    return out


# ---------------------------------------------------------------------------
# Champions league
# ---------------------------------------------------------------------------


def psi_block_stat(f: Candidate, h: Candidate, block: range, data_part3) -> float:
    """``(2/m) sum_{i in block} (h(X_i) - f(X_i)) * (f(X_i) - Y_i)``."""
    xs, ys = _block_rows(block, *data_part3)
    pf = f.predict(xs)
    s = np.sum((h.predict(xs) - pf) * (pf - ys))
    return float((2.0 / len(block)) * s)


def _home_record(home_id, away_id, count, n) -> MatchRecord:
    # the home side "takes" a block when the statistic clears the threshold
    return MatchRecord.from_tally(home_id, away_id, count, n - count, n)


def home_match(
    home: Candidate,
    away: Candidate,
    partition: BlockPartition,
    data_part3,
    r1: float,
) -> int:
    """1 when the home side keeps the Psi statistic ``>= -r1**2/10`` on a
    strict majority of blocks."""
    if home.id == away.id:
        raise InvalidArgumentError("a candidate cannot play a home match against itself")
    threshold = -(r1**2) / 10
    count = sum(
        psi_block_stat(home, away, block, data_part3) >= threshold
        for block in partition.index_ranges
    )
    return int(2 * count > partition.n_blocks)


def mom_squared_risk(coeffs, xs, ys, ell: int) -> np.ndarray:
    """Med_ell of squared residuals for every row of ``coeffs``."""
    ell = min(int(ell), len(ys))
    res = xs @ np.asarray(coeffs, dtype=np.float64).T - ys[:, None]
    return kernels.column_med_of_means(res * res, ell)


def _pick(ids, tie_break, pool, data_part3, ell):
    ids = sorted(ids)
    if len(ids) == 1 or tie_break is TieBreak.LOWEST_ID:
        return ids[0]
    xs, ys = data_part3
    risks = mom_squared_risk(pool.coeff_matrix[ids], xs, ys, ell)
    return ids[int(np.argmin(risks))]  # argmin keeps the lowest id on ties


def champions_league(
    qualifiers: QualifierSet,
    pool: CandidatePool,
    partition: BlockPartition,
    data_part3,
    config: TournamentConfig,
    fast: bool = True,
    force_copeland: bool = False,
) -> ChampionResult:
    """Select a qualifier that wins all of its home matches.

    Ties among such champions follow ``config.tie_break``. If nobody wins
    every home match, ``config.fallback`` decides: ``COPELAND`` takes the
    fewest home losses (then the tie break), ``FAIL`` raises
    :class:`NoChampionError`.
    """
    ids = list(qualifiers.ids)
    if not ids:
        raise InvalidStateError("champions league needs at least one qualifier")
    if len(ids) == 1 and not force_copeland:
        return ChampionResult(ids[0], (), False, (ids[0],))

    n, m = partition.n_blocks, partition.block_size
    r1 = config.r1
    threshold = -(r1**2) / 10
    if fast:
        xs, ys = data_part3
        pred = xs[: partition.n_used] @ pool.coeff_matrix[ids].T
        counts = kernels.home_tallies(pred, ys[: partition.n_used], m, n, threshold)
    else:
        counts = np.zeros((len(ids), len(ids)), dtype=np.int64)
        for a, b in itertools.permutations(range(len(ids)), 2):
            counts[a, b] = sum(
                psi_block_stat(pool[ids[a]], pool[ids[b]], block, data_part3) >= threshold
                for block in partition.index_ranges
            )

    records = []
    losses = np.zeros(len(ids), dtype=np.int64)
    for a, b in itertools.permutations(range(len(ids)), 2):
        rec = _home_record(ids[a], ids[b], counts[a, b], n)
        records.append(rec)
        if rec.outcome is not Outcome.F_WINS:
            losses[a] += 1
    records.sort(key=lambda r: (r.f_id, r.h_id))

    champions = [ids[a] for a in range(len(ids)) if losses[a] == 0]
    ell = config.ell
    if champions and not force_copeland:
        winner = _pick(champions, config.tie_break, pool, data_part3, ell)
        return ChampionResult(winner, tuple(records), False, tuple(champions))
    if config.fallback is Fallback.FAIL and not force_copeland:
        raise NoChampionError("no qualifier won all of its home matches")
    fewest = losses.min()
    best = [ids[a] for a in range(len(ids)) if losses[a] == fewest]
    winner = _pick(best, config.tie_break, pool, data_part3, ell)
    log.info("champions league fell back to Copeland scoring (winner %d)", winner)
    return ChampionResult(winner, tuple(records), True, tuple(champions))


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def run_tournament(
    dataset: Dataset,
    pool: CandidatePool,
    config: TournamentConfig,
    fast: bool = True,
) -> TournamentOutcome:
    """Distance oracle on part 1, preliminary round on part 2, champions
    league on part 3, with the same block partition for both rounds.

    If the preliminary round leaves no qualifier, the champions league is run
    over the whole pool with Copeland scoring and ``fallback_used`` is set.
    """
    if pool.n_dim != dataset.n_dim:
        raise InvalidArgumentError(
            f"pool dimension {pool.n_dim} does not match data dimension {dataset.n_dim}"
        )
    N = dataset.n_per_part
    n_blocks = choose_block_count(N, config.r, config.sigma, config.theta)
    partition = make_block_partition(N, n_blocks)
    oracle = OracleState.from_config(dataset.part(0)[0], config)
    part2, part3 = dataset.part(1), dataset.part(2)

    qualifiers = preliminary_round(pool, partition, part2, oracle, fast=fast)
    if qualifiers.ids:
        result = champions_league(qualifiers, pool, partition, part3, config, fast=fast)
    else:
        log.warning("empty qualifier set; champions league over the full pool")
        everyone = QualifierSet(tuple(range(len(pool))), qualifiers.round_log)
        result = champions_league(
            everyone, pool, partition, part3, config, fast=fast, force_copeland=True
        )
    return TournamentOutcome(pool[result.winner_id], qualifiers, result)
