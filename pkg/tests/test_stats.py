"""Statistics module versus closed forms, quadrature, and scipy.

scipy is used here purely as an independent oracle; the package itself
computes every distribution function from scratch.
"""

import math
import random

import pytest
import scipy.integrate
import scipy.special
import scipy.stats

from scriptshift import stats
from scriptshift.stats import (CorrelationResult, PairedSample, TTestResult,
                               average_ranks, paired_t_test, pearson,
                               regularized_incomplete_beta, significance_mask,
                               spearman, t_cdf)


def t_density(x, df):
    coeff = math.exp(math.lgamma((df + 1) / 2.0) - math.lgamma(df / 2.0)) \
        / math.sqrt(df * math.pi)
    return coeff * (1.0 + x * x / df) ** (-(df + 1) / 2.0)


def t_cdf_by_quadrature(t, df):
    if t < 0:
        return 1.0 - t_cdf_by_quadrature(-t, df)
    central, central_err = scipy.integrate.quad(
        t_density, 0.0, t, args=(df,), epsabs=1e-13, limit=200)
    tail, tail_err = scipy.integrate.quad(
        t_density, t, math.inf, args=(df,), epsabs=1e-13, limit=200)
    if central_err <= tail_err:
        assert central_err < 1e-11
        return 0.5 + central
    assert tail_err < 1e-11
    return 1.0 - tail


class TestIncompleteBeta:
    def test_boundaries(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, -2.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, 1.5)

    def test_uniform_case_is_identity(self):
        for x in (0.1, 0.25, 0.5, 0.75, 0.9):
            assert regularized_incomplete_beta(1.0, 1.0, x) == \
                pytest.approx(x, abs=1e-15)

    def test_symmetry_relation(self):
        for a, b in ((0.5, 0.5), (1.0, 3.0), (2.5, 7.0), (10.0, 0.5)):
            for x in (0.05, 0.3, 0.5, 0.7, 0.95):
                direct = regularized_incomplete_beta(a, b, x)
                mirrored = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
                assert direct == pytest.approx(mirrored, abs=1e-13)

    def test_against_scipy_grid(self):
        shapes = (0.5, 1.0, 2.0, 3.5, 10.0, 25.0)
        xs = (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
        for a in shapes:
            for b in shapes:
                for x in xs:
                    ours = regularized_incomplete_beta(a, b, x)
                    ref = scipy.special.betainc(a, b, x)
                    assert ours == pytest.approx(ref, rel=1e-12,
                                                 abs=1e-14), (a, b, x)


class TestTCdf:
    def test_center_is_half(self):
        for df in (1, 2, 5, 30, 200):
            assert t_cdf(0.0, df) == 0.5

    def test_cauchy_closed_form(self):
        # one degree of freedom is the Cauchy distribution
        for t in (-50.0, -7.5, -1.0, -0.1, 0.3, 2.0, 12.0, 50.0):
            expected = 0.5 + math.atan(t) / math.pi
            assert t_cdf(t, 1) == pytest.approx(expected, abs=1e-12)

    def test_two_df_closed_form(self):
        for t in (-9.0, -2.0, -0.5, 0.4, 1.0, 6.0):
            expected = 0.5 + t / (2.0 * math.sqrt(t * t + 2.0))
            assert t_cdf(t, 2) == pytest.approx(expected, abs=1e-13)

    def test_symmetry(self):
        for df in (1, 3, 10):
            for t in (0.2, 1.0, 2.5, 8.0):
                assert t_cdf(-t, df) == pytest.approx(1.0 - t_cdf(t, df),
                                                      abs=1e-15)

    def test_monotone_in_t(self):
        for df in (1, 4, 25):
            grid = [t_cdf(-10.0 + 0.5 * i, df) for i in range(41)]
            assert all(lo < hi for lo, hi in zip(grid, grid[1:]))

    def test_infinities_and_errors(self):
        assert t_cdf(math.inf, 5) == 1.0
        assert t_cdf(-math.inf, 5) == 0.0
        with pytest.raises(ValueError):
            t_cdf(math.nan, 5)
        with pytest.raises(ValueError):
            t_cdf(1.0, 0)

    def test_against_scipy_grid(self):
        for df in (1, 2, 3, 5, 10, 30, 100):
            for t in (-20.0, -4.2, -1.3, -0.01, 0.9, 3.3, 15.0):
                assert t_cdf(t, df) == pytest.approx(
                    scipy.stats.t.cdf(t, df), rel=1e-12, abs=1e-14), (t, df)

    def test_against_quadrature(self):
        for df in (1, 3, 7, 20):
            for t in (-6.0, -1.5, 0.8, 4.0):
                assert t_cdf(t, df) == pytest.approx(
                    t_cdf_by_quadrature(t, df), abs=1e-10), (t, df)


class TestPearson:
    def test_hand_computed_fixture(self):
        # centered covariance 3.0 with both variances 5.0 gives r = 0.6
        result = pearson((1.0, 2.0, 3.0, 4.0), (2.0, 1.0, 4.0, 3.0))
        assert result.r == pytest.approx(0.6, abs=1e-15)
        assert result.n == 4
        assert result.method == "pearson"
        ref_r, ref_p = scipy.stats.pearsonr([1, 2, 3, 4], [2, 1, 4, 3])
        assert result.r == pytest.approx(ref_r, abs=1e-14)
        assert result.p_value == pytest.approx(ref_p, rel=1e-10)

    def test_perfect_correlation_is_exact(self):
        up = pearson((1.0, 2.0, 3.0), (3.0, 5.0, 7.0))
        assert (up.r, up.p_value) == (1.0, 0.0)
        down = pearson((1.0, 2.0, 3.0), (0.0, -1.0, -2.0))
        assert (down.r, down.p_value) == (-1.0, 0.0)

    def test_validation(self):
        with pytest.raises(ValueError, match="length"):
            pearson((1.0, 2.0, 3.0), (1.0, 2.0))
        with pytest.raises(ValueError, match="3 points"):
            pearson((1.0, 2.0), (3.0, 4.0))
        with pytest.raises(ValueError, match="constant"):
            pearson((1.0, 1.0, 1.0), (1.0, 2.0, 3.0))

    def test_against_scipy_random(self):
        for seed in range(30):
            rng = random.Random(seed)
            n = rng.randint(5, 30)
            x = [rng.gauss(0, 1) for _ in range(n)]
            y = [0.4 * xi + rng.gauss(0, 1) for xi in x]
            ours = pearson(x, y)
            ref_r, ref_p = scipy.stats.pearsonr(x, y)
            assert ours.r == pytest.approx(ref_r, abs=1e-12), f"seed {seed}"
            assert ours.p_value == pytest.approx(ref_p, rel=1e-9,
                                                 abs=1e-14), f"seed {seed}"


class TestSpearman:
    def test_monotone_transform_gives_one(self):
        x = (1.0, 2.0, 3.0, 4.0, 5.0)
        y = tuple(v ** 3 for v in x)
        result = spearman(x, y)
        assert (result.r, result.p_value) == (1.0, 0.0)
        assert result.method == "spearman"

    def test_reversal_gives_minus_one(self):
        x = (1.0, 2.0, 3.0, 4.0)
        result = spearman(x, tuple(reversed(x)))
        assert (result.r, result.p_value) == (-1.0, 0.0)

    def test_with_ties_against_scipy(self):
        x = (1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 7.0)
        y = (2.0, 1.0, 4.0, 4.0, 6.0, 5.0, 9.0)
        ours = spearman(x, y)
        ref = scipy.stats.spearmanr(x, y)
        assert ours.r == pytest.approx(ref.statistic, abs=1e-12)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9)

    def test_against_scipy_random(self):
        for seed in range(30):
            rng = random.Random(100 + seed)
            n = rng.randint(5, 25)
            # quantized values so ties actually occur
            x = [round(rng.uniform(0, 5)) * 1.0 for _ in range(n)]
            y = [round(rng.uniform(0, 5)) * 1.0 for _ in range(n)]
            try:
                ours = spearman(x, y)
            except ValueError:
                continue  # constant series after quantization
            ref = scipy.stats.spearmanr(x, y)
            assert ours.r == pytest.approx(ref.statistic,
                                           abs=1e-12), f"seed {seed}"
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9,
                                                 abs=1e-14), f"seed {seed}"


class TestAverageRanks:
    def test_tie_fixture(self):
        assert average_ranks([10.0, 20.0, 20.0, 30.0]) == [1.0, 2.5, 2.5, 4.0]

    def test_all_equal(self):
        assert average_ranks([7.0, 7.0, 7.0]) == [2.0, 2.0, 2.0]

    def test_against_scipy_rankdata(self):
        for seed in range(20):
            rng = random.Random(200 + seed)
            values = [round(rng.uniform(0, 4), 1)
                      for _ in range(rng.randint(1, 20))]
            assert average_ranks(values) == \
                list(scipy.stats.rankdata(values))


class TestPairedTTest:
    def test_identical_measurements(self):
        sample = PairedSample(("a", "b", "c"), (1.0, 2.0, 3.0),
                              (1.0, 2.0, 3.0))
        assert paired_t_test(sample) == TTestResult(0.0, 1.0, 3)

    def test_hand_computed_fixture(self):
        # differences (1, 2, 3, 4): t = sqrt(15) with three degrees of freedom
        sample = PairedSample(("w", "x", "y", "z"), (2.0, 4.0, 6.0, 8.0),
                              (1.0, 2.0, 3.0, 4.0))
        result = paired_t_test(sample)
        assert result.t == pytest.approx(math.sqrt(15.0), abs=1e-13)
        assert result.n == 4
        ref = scipy.stats.ttest_rel([2, 4, 6, 8], [1, 2, 3, 4])
        assert result.p_value == pytest.approx(ref.pvalue, rel=1e-12)
        quad_p = 2.0 * (1.0 - t_cdf_by_quadrature(math.sqrt(15.0), 3))
        assert result.p_value == pytest.approx(quad_p, abs=1e-10)

    def test_swapping_sides_negates_t(self):
        a = (1.0, 3.0, 2.0, 5.0)
        b = (0.5, 3.5, 1.0, 4.0)
        labels = ("p", "q", "r", "s")
        forward = paired_t_test(PairedSample(labels, a, b))
        backward = paired_t_test(PairedSample(labels, b, a))
        assert forward.t == pytest.approx(-backward.t, abs=1e-15)
        assert forward.p_value == pytest.approx(backward.p_value, abs=1e-15)

    def test_constant_nonzero_difference(self):
        sample = PairedSample(("a", "b"), (2.0, 3.0), (1.0, 2.0))
        assert paired_t_test(sample) == TTestResult(math.inf, 0.0, 2)
        flipped = PairedSample(("a", "b"), (1.0, 2.0), (2.0, 3.0))
        assert paired_t_test(flipped) == TTestResult(-math.inf, 0.0, 2)

    def test_against_scipy_random(self):
        for seed in range(40):
            rng = random.Random(300 + seed)
            n = rng.randint(3, 30)
            a = [rng.gauss(0.2, 1) for _ in range(n)]
            b = [rng.gauss(0.0, 1) for _ in range(n)]
            labels = tuple(f"l{i}" for i in range(n))
            ours = paired_t_test(PairedSample(labels, tuple(a), tuple(b)))
            ref = scipy.stats.ttest_rel(a, b)
            assert ours.t == pytest.approx(ref.statistic,
                                           rel=1e-12), f"seed {seed}"
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9,
                                                 abs=1e-14), f"seed {seed}"

    def test_sample_validation(self):
        with pytest.raises(ValueError, match="align"):
            PairedSample(("a",), (1.0, 2.0), (1.0, 2.0))
        with pytest.raises(ValueError, match="two pairs"):
            PairedSample(("a",), (1.0,), (1.0,))


class TestSignificance:
    def test_mask(self):
        mask = significance_mask({"x": 0.01, "y": 0.20, "z": 0.05})
        assert mask == {"x": True, "y": False, "z": False}

    def test_custom_alpha(self):
        assert significance_mask({"x": 0.07}, alpha=0.1) == {"x": True}

    def test_alpha_validation(self):
        for alpha in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ValueError, match="alpha"):
                significance_mask({"x": 0.01}, alpha=alpha)

    def test_correlation_result_significant(self):
        result = CorrelationResult("pearson", 0.9, 0.001, 10)
        assert result.significant()
        assert not result.significant(alpha=0.0005)
