import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mom_tournament.core import InvalidArgumentError
from mom_tournament.mom import deviation_radius, med_of_means, mom_mean_estimator


def sort_oracle(values, ell):
    """Median of block means via a full sort; independent of the kernels.

    ``floor(len / ell)`` blocks of size ``floor(len / k)``, tail dropped.
    """
    k = len(values) // ell
    m = len(values) // k
    means = sorted(sum(values[j * m:(j + 1) * m]) / m for j in range(k))
    return means[(k - 1) // 2]


small_ints = st.lists(st.integers(-1000, 1000), min_size=1, max_size=60)


class TestMedOfMeans:
    def test_constant(self):
        assert med_of_means([5, 5, 5, 5], 2).value == 5

    def test_outlier_block_ignored(self):
        est = med_of_means([0, 0, 100, 0, 0, 0], 2)
        np.testing.assert_array_equal(est.block_means, [0, 50, 0])
        assert est.value == 0

    def test_single_block_is_mean(self):
        v = [1.0, 2.0, 4.0, 9.0]
        assert med_of_means(v, 4).value == pytest.approx(4.0)

    def test_even_block_count_takes_lower_middle(self):
        assert med_of_means([1, 2, 3, 4], 1).value == 2

    def test_tail_dropped(self):
        assert med_of_means([1, 1, 1, 1, 1000], 2).value == 1

    def test_blocks_widen_when_ell_does_not_divide(self):
        # 7 values, ell = 3: two blocks of size 3, last value dropped
        est = med_of_means([0, 0, 3, 3, 3, 3, 99], 3)
        np.testing.assert_array_equal(est.block_means, [1, 3])

    @pytest.mark.parametrize("ell", [0, 7])
    def test_bad_ell(self, ell):
        with pytest.raises(InvalidArgumentError):
            med_of_means([1, 2, 3], ell)

    def test_block_means_read_only(self):
        est = med_of_means([1.0, 2.0], 1)
        with pytest.raises(ValueError):
            est.block_means[0] = 0

    @given(small_ints, st.data())
    def test_matches_sort_oracle(self, values, data):
        # integer inputs keep every block sum exact, so equality is exact
        ell = data.draw(st.integers(1, len(values)))
        assert med_of_means(values, ell).value == sort_oracle(values, ell)

    @given(small_ints, st.data())
    def test_permutation_within_block_invariant(self, values, data):
        ell = data.draw(st.integers(1, len(values)))
        m = len(values) // (len(values) // ell)
        j = data.draw(st.integers(0, len(values) // m - 1))
        block = values[j * m:(j + 1) * m]
        shuffled = data.draw(st.permutations(block))
        perturbed = values[: j * m] + list(shuffled) + values[(j + 1) * m:]
        assert med_of_means(perturbed, ell).value == med_of_means(values, ell).value

    def test_permutation_across_blocks_can_change_value(self):
        assert med_of_means([0, 0, 10, 10, 10, 10], 2).value == 10
        assert med_of_means([0, 10, 0, 10, 10, 10], 2).value == 5

    @given(
        arrays(np.float64, st.integers(3, 15), elements=st.floats(-10, 10)),
        st.data(),
    )
    def test_corrupted_minority_of_blocks_stays_in_range(self, means, data):
        k = means.size
        ell = 3
        values = np.repeat(means, ell)
        n_bad = data.draw(st.integers(0, math.ceil(k / 2) - 1))
        bad = data.draw(st.lists(st.integers(0, k - 1), min_size=n_bad, max_size=n_bad, unique=True))
        junk = data.draw(st.sampled_from([1e12, -1e12]))
        for j in bad:
            values[j * ell:(j + 1) * ell] = junk
        good = np.delete(np.repeat(means, ell).reshape(k, ell).mean(axis=1), bad)
        out = med_of_means(values, ell).value
        assert good.min() <= out <= good.max()


class TestDeviationRadius:
    def test_unit_case(self):
        assert deviation_radius(1.0, 1, 1 / math.e) == pytest.approx(4 * math.e, rel=1e-14)

    def test_hand_value(self):
        # 2e * sqrt(0.5) * sqrt(2/100) = 2e * sqrt(0.01) = 0.2e
        assert deviation_radius(0.25, 100, 1 / math.e) == pytest.approx(0.2 * math.e, rel=1e-14)

    @given(st.floats(0.01, 100), st.integers(1, 10**6), st.floats(1e-6, 0.99))
    def test_inverse_sqrt_n(self, var, N, delta):
        ratio = deviation_radius(var, N, delta) / deviation_radius(var, 2 * N, delta)
        assert ratio == pytest.approx(math.sqrt(2), rel=1e-12)

    @pytest.mark.parametrize("args", [(0, 10, 0.1), (1, 0, 0.1), (1, 10, 1.0), (1, 10, 0.0)])
    def test_invalid(self, args):
        with pytest.raises(InvalidArgumentError):
            deviation_radius(*args)


class TestMomMeanEstimator:
    def test_one_block_is_sample_mean(self):
        v = np.random.default_rng(0).standard_normal(101)
        est = mom_mean_estimator(v, 0.99)
        assert est.block_means.size == 1
        assert est.value == pytest.approx(v.mean(), rel=1e-12)

    def test_block_layout(self):
        est = mom_mean_estimator(np.arange(1000.0), 0.01)
        assert est.block_means.size == 5
        np.testing.assert_allclose(est.block_means, [99.5, 299.5, 499.5, 699.5, 899.5])

    def test_radius_attached(self):
        est = mom_mean_estimator(np.ones(100), 0.1, variance=2.0)
        assert est.bound_radius == deviation_radius(2.0, 100, 0.1)
        assert mom_mean_estimator(np.ones(100), 0.1).bound_radius is None

    def test_delta_range(self):
        N = 10
        lo = math.exp(1 - N / 2)
        mom_mean_estimator(np.ones(N), lo)
        with pytest.raises(InvalidArgumentError):
            mom_mean_estimator(np.ones(N), lo * 0.999)
        with pytest.raises(InvalidArgumentError):
            mom_mean_estimator(np.ones(N), 1.0)
        with pytest.raises(InvalidArgumentError):
            mom_mean_estimator(np.ones(3), 0.5)

    @pytest.mark.slow
    def test_coverage_small(self):
        # cheap version of the acceptance check: Gaussian data, delta = 0.05
        rng = np.random.default_rng(7)
        N, delta, trials = 400, 0.05, 2000
        r = deviation_radius(1.0, N, delta)
        miss = sum(abs(mom_mean_estimator(rng.standard_normal(N), delta).value) > r for _ in range(trials))
        assert miss / trials <= delta
