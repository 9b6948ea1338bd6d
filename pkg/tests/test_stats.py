"""Distribution tails and the two-sample comparison logic."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from cuberec import compare_methods, ValidationError
from cuberec.stats import f_cdf, f_sf_two_sided, reg_inc_beta, t_sf_two_sided

FIXTURES = Path(__file__).parent / "fixtures" / "stats_reference.json"

scipy_special = pytest.importorskip("scipy.special")
scipy_stats = pytest.importorskip("scipy.stats")


class TestIncompleteBeta:
    def test_grid_against_reference_implementation(self):
        rng = np.random.default_rng(71)
        for _ in range(400):
            a = float(rng.uniform(0.25, 60.0))
            b = float(rng.uniform(0.25, 60.0))
            x = float(rng.uniform(0.0, 1.0))
            ours = reg_inc_beta(a, b, x)
            ref = float(scipy_special.betainc(a, b, x))
            assert abs(ours - ref) < 1e-10

    def test_endpoints(self):
        assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
        assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            reg_inc_beta(0.0, 1.0, 0.5)


class TestDistributionTails:
    def test_t_two_sided_matches_reference(self):
        rng = np.random.default_rng(73)
        for _ in range(200):
            t = float(rng.uniform(-8.0, 8.0))
            df = float(rng.integers(1, 120))
            ours = t_sf_two_sided(t, df)
            ref = 2.0 * float(scipy_stats.t.sf(abs(t), df))
            assert abs(ours - ref) < 1e-10

    def test_f_cdf_matches_reference(self):
        rng = np.random.default_rng(79)
        for _ in range(200):
            f = float(rng.uniform(0.0, 12.0))
            d1 = float(rng.integers(1, 60))
            d2 = float(rng.integers(1, 60))
            assert abs(f_cdf(f, d1, d2)
                       - float(scipy_stats.f.cdf(f, d1, d2))) < 1e-10

    def test_infinite_statistics(self):
        assert t_sf_two_sided(math.inf, 5.0) == 0.0
        assert f_cdf(math.inf, 3.0, 4.0) == 1.0
        assert f_sf_two_sided(math.inf, 3.0, 4.0) == 0.0


class TestCompareMethods:
    def _load_cases(self):
        return json.loads(FIXTURES.read_text())["cases"]

    def test_reference_fixtures_to_1e6(self):
        for name, case in self._load_cases().items():
            result = compare_methods(case["a"], case["b"], alpha=0.05)
            expected = case["expected"]
            assert result.welch_used == expected["welch_used"], name
            assert abs(result.f_statistic - expected["f_statistic"]) < 1e-6, name
            assert abs(result.f_p_value - expected["f_p_value"]) < 1e-6, name
            assert abs(result.t_statistic - expected["t_statistic"]) < 1e-6, name
            assert abs(result.t_df - expected["t_df"]) < 1e-6, name
            assert abs(result.t_p_value - expected["t_p_value"]) < 1e-6, name

    def test_identical_samples_not_significant(self):
        result = compare_methods([1, 2, 3, 4, 5], [1, 2, 3, 4, 5])
        assert result.t_statistic == 0.0
        assert not result.significant

    def test_textbook_shift_is_significant(self):
        result = compare_methods([1, 2, 3, 4, 5], [11, 12, 13, 14, 15],
                                 alpha=0.05)
        assert result.significant

    def test_swapping_flips_t_keeps_p(self):
        a = [0.61, 0.59, 0.64, 0.57, 0.6]
        b = [0.52, 0.55, 0.51, 0.56, 0.5]
        fwd = compare_methods(a, b)
        rev = compare_methods(b, a)
        assert fwd.t_statistic == pytest.approx(-rev.t_statistic, abs=1e-12)
        assert fwd.t_p_value == pytest.approx(rev.t_p_value, abs=1e-12)

    def test_p_values_in_unit_interval(self):
        rng = np.random.default_rng(83)
        for _ in range(50):
            a = rng.normal(0.6, 0.05, int(rng.integers(2, 15))).tolist()
            b = rng.normal(0.62, 0.08, int(rng.integers(2, 15))).tolist()
            result = compare_methods(a, b)
            assert 0.0 <= result.t_p_value <= 1.0
            assert 0.0 <= result.f_p_value <= 1.0

    def test_pooled_equals_welch_on_equal_variance_inputs(self):
        # equal sizes and equal sample variances: both routes coincide
        a = [1.0, 2.0, 3.0, 4.0]
        b = [2.5, 3.5, 4.5, 5.5]
        gated = compare_methods(a, b)
        assert not gated.welch_used
        n1 = n2 = 4
        v = np.var(a, ddof=1)
        se = math.sqrt(v / n1 + v / n2)
        welch_t = (np.mean(a) - np.mean(b)) / se
        welch_df = (v / n1 + v / n2) ** 2 / (
            (v / n1) ** 2 / (n1 - 1) + (v / n2) ** 2 / (n2 - 1))
        assert gated.t_statistic == pytest.approx(welch_t, abs=1e-9)
        assert gated.t_df == pytest.approx(welch_df, abs=1e-9)
        assert gated.t_p_value == pytest.approx(
            t_sf_two_sided(welch_t, welch_df), abs=1e-9)

    def test_zero_variance_equal_means(self):
        result = compare_methods([0.5, 0.5, 0.5], [0.5, 0.5])
        assert not result.significant
        assert result.t_statistic == 0.0
        assert result.t_p_value == 1.0

    def test_zero_variance_different_means(self):
        result = compare_methods([0.5, 0.5], [0.7, 0.7, 0.7])
        assert result.significant
        assert result.t_p_value == 0.0
        assert math.isinf(result.t_statistic)

    def test_single_zero_variance_side_uses_welch(self):
        result = compare_methods([0.5, 0.5, 0.5], [0.4, 0.6, 0.55])
        assert result.welch_used
        assert 0.0 <= result.t_p_value <= 1.0

    def test_needs_two_entries(self):
        with pytest.raises(ValidationError):
            compare_methods([1.0], [1.0, 2.0])
