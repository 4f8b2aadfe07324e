"""Combiners: evaluation, homogeneity, combined p-values, FCT pipeline."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ks_bound, ks_uniform
from tailcomb.combiners import (
    CombinerKind,
    MaxLinearCoefficients,
    cct,
    combined_pvalue,
    evaluate,
    fct,
    fct_statistic,
    homogeneity_check,
    linear,
    max_linear,
    pct,
    power_mean,
    power_mean_test,
    tippett,
    tippett_test,
)
from tailcomb.errors import ConfigurationError, DomainError
from tailcomb.transforms import TailScale, frechet_transform, sidak_screen
from tailcomb.combiners import TestSpec


class TestEvaluate:
    def test_linear(self):
        assert evaluate(linear([0.5, 0.5]), [2.0, 2.0]) == 2.0
        # positive part
        assert evaluate(linear([0.5, 0.5]), [-3.0, 1.0]) == 0.0

    def test_tippett(self):
        assert evaluate(tippett(), [4.0, 1.0]) == 2.0
        with pytest.raises(DomainError):
            evaluate(tippett(), [-1.0, 1.0])

    def test_power_mean(self):
        got = evaluate(power_mean(2.0, [0.5, 0.5]), [1.0, 0.0])
        assert got == pytest.approx(math.sqrt(0.5), rel=1e-15)
        with pytest.raises(DomainError):
            evaluate(power_mean(2.0, [0.5, 0.5]), [-1.0, 0.0])

    def test_max_linear_is_normalized_statistic(self):
        comb = max_linear([[0, 1], [2, 3]], [0.5, 0.5], 4)
        coef = comb.max_linear_coefficients()
        z = np.array([4.0, 1.0, 2.0, 8.0])
        expected = np.max(coef.a_w * z) / coef.c_w
        assert evaluate(comb, z) == pytest.approx(expected, rel=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            evaluate(linear([0.5, 0.5]), [1.0, 2.0, 3.0])

    def test_batch_evaluation(self):
        rows = np.array([[2.0, 2.0], [4.0, 0.0]])
        np.testing.assert_allclose(evaluate(linear([0.5, 0.5]), rows), [2.0, 2.0])


class TestWeights:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            linear([0.5, 0.6])
        with pytest.raises(ConfigurationError):
            linear([-0.1, 1.1])
        with pytest.raises(ConfigurationError):
            power_mean(0.0, [1.0])


class TestHomogeneity:
    def test_spec_examples(self):
        assert homogeneity_check(linear([0.5, 0.5]), [1.0, 3.0], 7.0)
        assert homogeneity_check(power_mean(2.0, [0.5, 0.5]), [1.0, 2.0], 10.0)
        assert homogeneity_check(tippett(), [0.0, 0.0], 5.0)

    @pytest.mark.parametrize("c", [0.1, 1.0, 13.7])
    def test_random_vectors(self, c, rng):
        combs = [
            linear([0.3, 0.2, 0.5]),
            tippett(),
            power_mean(2.0, [0.3, 0.2, 0.5]),
            power_mean(0.5, [0.3, 0.2, 0.5]),
            max_linear([[0, 1], [1, 2]], [0.4, 0.6], 3),
        ]
        for comb in combs:
            for _ in range(20):
                x = rng.random(3) * 10.0
                assert homogeneity_check(comb, x, c)

    @given(
        x=st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=2, max_size=2),
        c=st.floats(min_value=1e-3, max_value=1e3),
    )
    @settings(max_examples=200, deadline=None)
    def test_linear_property(self, x, c):
        assert homogeneity_check(linear([0.5, 0.5]), x, c)


class TestMaxLinearCoefficients:
    def test_cw_examples(self):
        # four factors in two disjoint blocks of two: a_w(j) = 1/4 each
        coef = MaxLinearCoefficients.from_blocks([[0, 1], [2, 3]], [0.5, 0.5], 4)
        np.testing.assert_allclose(coef.a_w, 0.25)
        assert coef.c_w == pytest.approx(1.0, abs=1e-15)
        # singleton blocks
        coef = MaxLinearCoefficients.from_blocks([[0], [1]], [0.5, 0.5], 2)
        assert coef.c_w == pytest.approx(1.0, abs=1e-15)

    def test_cw_recomputation(self):
        w = np.array([0.2, 0.5, 0.3])
        blocks = [[0, 1, 2], [1, 3], [2, 3, 4]]
        coef = MaxLinearCoefficients.from_blocks(blocks, w, 5)
        recomputed = np.max(w[:, None] * coef.a, axis=0).sum()
        assert abs(coef.c_w - recomputed) <= 1e-14
        assert np.all(np.max(coef.a, axis=0) > 0)

    def test_coverage_required(self):
        with pytest.raises(ConfigurationError):
            MaxLinearCoefficients.from_blocks([[0, 1]], [1.0], 3)

    def test_bad_blocks(self):
        with pytest.raises(ConfigurationError):
            MaxLinearCoefficients.from_blocks([[], [0]], [0.5, 0.5], 1)
        with pytest.raises(ConfigurationError):
            MaxLinearCoefficients.from_blocks([[0, 5]], [1.0], 2)


class TestFctStatistic:
    def test_all_half(self):
        y_w, c_w = fct_statistic([[0], [1]], [0.5, 0.5], [0.5, 0.5])
        assert c_w == pytest.approx(1.0, abs=1e-15)
        # Y_j = -1/log(0.5) = 1.4427, Y_w = 0.72135
        assert y_w == pytest.approx(0.7213475204444817, rel=1e-14)

    def test_matches_screened_pipeline(self, rng):
        blocks = [[0, 1, 2], [2, 3]]
        weights = [0.6, 0.4]
        p = rng.random((50, 4)) * 0.999 + 5e-4
        y_w, _ = fct_statistic(blocks, weights, p)
        # literal sidak -> frechet composition
        cols = []
        for w, block in zip(weights, blocks):
            m = p[:, block].min(axis=1)
            cols.append(w * frechet_transform(sidak_screen(m, len(block))))
        expected = np.max(np.stack(cols, axis=1), axis=1)
        np.testing.assert_allclose(y_w, expected, rtol=1e-12)

    def test_errors(self):
        with pytest.raises(ConfigurationError):
            fct_statistic([[0]], [1.0], [0.5, 0.5])  # factor 2 uncovered
        with pytest.raises(ConfigurationError):
            fct_statistic([[0, 7]], [1.0], [0.5, 0.5])


class TestCombinedPValue:
    def test_pct(self):
        assert combined_pvalue(pct([0.5, 0.5]), [0.5, 0.5]) == pytest.approx(0.5, rel=1e-15)

    def test_cct(self):
        assert combined_pvalue(cct([0.5, 0.5]), [0.5, 0.5]) == pytest.approx(0.5, abs=1e-15)

    def test_tippett(self):
        got = combined_pvalue(tippett_test(), [0.1, 0.2, 0.3])
        assert got == pytest.approx(0.271, rel=1e-12)

    def test_fct_anchor_inversion(self):
        # Y_w / c_w = 1 must invert to 1 - e^{-1}
        test = fct([[0], [1]], [0.5, 0.5], 2)
        p_at_unit = 1.0 - math.exp(-1.0 / 2.0)  # Y_j = 2 so w_j Y_j = 1
        got = combined_pvalue(test, [p_at_unit, p_at_unit])
        assert got == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)

    def test_powermean(self):
        test = power_mean_test(2.0, [0.5, 0.5])
        p = combined_pvalue(test, [0.5, 0.5])
        # T = (0.5*4 + 0.5*4)^(1/2) = 2, anchor 1/T
        assert p == pytest.approx(0.5, rel=1e-14)

    def test_unsupported_pairing(self):
        bad = TestSpec("bad", TailScale.CAUCHY, tippett())
        with pytest.raises(ConfigurationError):
            combined_pvalue(bad, [0.5, 0.5])

    def test_monotone_evidence(self, rng):
        tests = [
            pct([0.3, 0.7]),
            cct([0.3, 0.7]),
            tippett_test(),
            power_mean_test(2.0, [0.3, 0.7]),
            fct([[0], [0, 1]], [0.5, 0.5], 2),
        ]
        for test in tests:
            for _ in range(50):
                p = rng.random(2) * 0.98 + 0.01
                i = rng.integers(2)
                q = p.copy()
                q[i] = p[i] * rng.random()
                assert combined_pvalue(test, q) <= combined_pvalue(test, p) + 1e-12

    def test_outputs_in_unit_interval(self, rng):
        tests = [pct([0.5, 0.5]), cct([0.5, 0.5]), tippett_test()]
        p = rng.random((200, 2))
        p = np.clip(p, 1e-12, 1 - 1e-12)
        for test in tests:
            out = combined_pvalue(test, p)
            assert np.all((out > 0.0) & (out <= 1.0))


class TestAnchorExactness:
    """Sidak/Tippett and independent-factor FCT are exactly calibrated."""

    N = 1_000_000

    def test_tippett_exact_on_iid(self, rng):
        p = rng.random((self.N, 4))
        out = combined_pvalue(tippett_test(), p)
        assert ks_uniform(out) <= ks_bound(self.N)

    def test_fct_exact_on_iid(self, rng):
        test = fct([[0, 1], [1, 2], [3]], [0.3, 0.4, 0.3], 4)
        p = rng.random((self.N, 4))
        out = combined_pvalue(test, p)
        assert ks_uniform(out) <= ks_bound(self.N)


class TestSingleDimension:
    def test_pct_is_identity_at_d1(self):
        assert combined_pvalue(pct([1.0]), [0.37]) == pytest.approx(0.37, rel=1e-15)

    def test_tippett_is_identity_at_d1(self):
        assert combined_pvalue(tippett_test(), [0.37]) == pytest.approx(0.37, rel=1e-12)
