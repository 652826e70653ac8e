import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mom_tournament.core import (
    Candidate,
    CandidatePool,
    Dataset,
    InvalidArgumentError,
    RngSpec,
    TournamentConfig,
    choose_block_count,
    make_block_partition,
)


class TestBlockPartition:
    def test_exact_division(self):
        p = make_block_partition(12, 3)
        assert p.block_size == 4
        assert p.index_ranges == [range(0, 4), range(4, 8), range(8, 12)]

    def test_remainder_is_discarded(self):
        p = make_block_partition(13, 3)
        assert p.block_size == 4 and p.n_used == 12
        assert all(12 not in b for b in p.index_ranges)

    def test_singletons(self):
        p = make_block_partition(7, 7)
        assert p.block_size == 1
        assert [list(b) for b in p.index_ranges] == [[i] for i in range(7)]

    @pytest.mark.parametrize("n, k", [(5, 0), (5, 6), (0, 1)])
    def test_invalid(self, n, k):
        with pytest.raises(InvalidArgumentError):
            make_block_partition(n, k)

    @given(st.integers(1, 500), st.data())
    def test_blocks_tile_used_prefix(self, n, data):
        k = data.draw(st.integers(1, n))
        p = make_block_partition(n, k)
        covered = [i for b in p.index_ranges for i in b]
        assert covered == list(range(p.n_used))
        assert p.n_used <= n and n - p.n_used < k
        assert make_block_partition(n, k) == p


class TestChooseBlockCount:
    @pytest.mark.parametrize(
        "N, r, sigma, theta, expected",
        [
            (1000, 1.0, 1.0, 0.1, 100),
            (1000, 0.1, 1.0, 0.1, 1),
            # 0.2 * 2000 * 0.5**2 = 100
            (2000, 0.5, 1.0, 0.2, 100),
            (1000, 3.0, 1.0, 0.1, 100),
            (50, 0.01, 1.0, 0.1, 1),
        ],
    )
    def test_values(self, N, r, sigma, theta, expected):
        assert choose_block_count(N, r, sigma, theta) == expected

    @pytest.mark.parametrize("args", [(0, 1, 1, 0.1), (10, 0, 1, 0.1), (10, 1, -1, 0.1)])
    def test_invalid(self, args):
        with pytest.raises(InvalidArgumentError):
            choose_block_count(*args)

    @given(
        st.integers(1, 10_000),
        st.floats(0.01, 0.99),
        st.floats(0.01, 0.99),
        st.floats(0.001, 5.0),
        st.floats(0.001, 5.0),
    )
    def test_monotone_and_bounded(self, N, th1, th2, r1, r2):
        lo, hi = sorted([th1, th2])
        assert choose_block_count(N, 1.0, 1.0, lo) <= choose_block_count(N, 1.0, 1.0, hi)
        ra, rb = sorted([r1, r2])
        assert choose_block_count(N, ra, 1.0, 0.1) <= choose_block_count(N, rb, 1.0, 0.1)
        assert 1 <= choose_block_count(N, r1, 1.0, th1) <= N


class TestDataset:
    def test_parts(self):
        xs = np.arange(18.0).reshape(9, 2)
        ds = Dataset(xs, np.arange(9.0))
        assert ds.n_per_part == 3 and ds.n_dim == 2
        np.testing.assert_array_equal(ds.part(1)[1], [3, 4, 5])
        np.testing.assert_array_equal(ds.rows((2, 0))[1], [0, 1, 2, 6, 7, 8])

    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(InvalidArgumentError):
            Dataset(np.zeros((4, 2)), np.zeros(4))
        with pytest.raises(InvalidArgumentError):
            Dataset(np.zeros((3, 2)), np.zeros(4))
        with pytest.raises(InvalidArgumentError):
            Dataset(np.array([[np.nan], [0], [0]]), np.zeros(3))

    def test_immutable(self):
        ds = Dataset(np.zeros((3, 1)), np.zeros(3))
        with pytest.raises(ValueError):
            ds.xs[0, 0] = 1.0


class TestCandidates:
    def test_pool_ids_follow_order(self):
        pool = CandidatePool.from_vectors([[0.0, 1.0], [1.0, 0.0]])
        assert [c.id for c in pool] == [0, 1]
        np.testing.assert_array_equal(pool.coeff_matrix, [[0, 1], [1, 0]])

    def test_pool_validation(self):
        with pytest.raises(InvalidArgumentError):
            CandidatePool(())
        with pytest.raises(InvalidArgumentError):
            CandidatePool((Candidate([1.0], 1),))
        with pytest.raises(InvalidArgumentError):
            Candidate([np.inf])


class TestTournamentConfig:
    def test_defaults(self):
        cfg = TournamentConfig(r=0.1, sigma=1.0)
        assert (cfg.alpha, cfg.beta, cfg.ell, cfg.theta, cfg.tau) == (0.5, 2.0, 8, 0.1, 0.2)
        assert cfg.r1 == pytest.approx(2 * 4 * 0.1)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(alpha=1.0),
            dict(beta=0.9),
            dict(theta=0.3, tau=0.2),
            dict(tau=0.25),
            dict(ell=0),
            dict(r=0.0),
        ],
    )
    def test_invariants(self, kw):
        base = dict(r=0.1, sigma=1.0)
        base.update(kw)
        with pytest.raises(InvalidArgumentError):
            TournamentConfig(**base)


class TestRng:
    def test_reproducible_and_distinct_streams(self):
        a = RngSpec(5, 1).generator().standard_normal(4)
        b = RngSpec(5, 1).generator().standard_normal(4)
        c = RngSpec(5, 2).generator().standard_normal(4)
        d = RngSpec(5, 1).generator(substream=1).standard_normal(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)

    def test_full_u64_range(self):
        RngSpec(2**64 - 1, 2**64 - 1).generator().random()
        with pytest.raises(InvalidArgumentError):
            RngSpec(-1, 0)
