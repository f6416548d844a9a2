"""Poisson pmf/tail arithmetic and the tail inequalities."""

import math
from fractions import Fraction

import pytest

from steinpoisson import PoissonLaw, difference_bound_series, verify_tail_inequalities

import oracles

LAM_GRID = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0]


class TestLogPmf:
    def test_closed_forms(self):
        assert PoissonLaw(2.0).log_pmf(0) == pytest.approx(-2.0, abs=1e-15)
        assert PoissonLaw(1.0).log_pmf(1) == pytest.approx(-1.0, abs=1e-15)

    def test_high_precision_spot_value(self):
        # frozen from the 60-digit series oracle: log(e^-0.5 * 0.5^10 / 10!)
        assert PoissonLaw(0.5).log_pmf(10) == pytest.approx(
            -22.53588437867496838939803, rel=1e-15
        )

    def test_against_series_oracle_grid(self):
        for lam in LAM_GRID:
            law = PoissonLaw(lam)
            for k in (0, 1, 3, 10, 40, 90):
                expected = float(oracles.mp_log_pmf(lam, k))
                assert law.log_pmf(k) == pytest.approx(expected, rel=5e-15), (lam, k)

    def test_pmf_sums_to_one_over_truncated_support(self):
        for lam in LAM_GRID:
            law = PoissonLaw(lam)
            k = 0
            while math.exp(law.log_tail(k)) >= 1e-15:
                k += 1
            total = math.fsum(math.exp(law.log_pmf(j)) for j in range(k))
            assert total == pytest.approx(1.0, abs=1e-12), lam

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError):
            PoissonLaw(1.0).log_pmf(-1)

    def test_rejects_bad_mean(self):
        with pytest.raises(ValueError):
            PoissonLaw(0.0)
        with pytest.raises(ValueError):
            PoissonLaw(-2.0)


class TestLogTail:
    def test_closed_forms(self):
        law = PoissonLaw(1.0)
        assert law.log_tail(0) == 0.0
        assert law.log_tail(2) == pytest.approx(math.log(1 - 2 * math.exp(-1)), rel=1e-14)

    def test_high_precision_spot_value(self):
        # frozen from the 60-digit series oracle: log P(Y >= 15), lam = 5
        assert PoissonLaw(5.0).log_tail(15) == pytest.approx(
            -8.393853727221188638196509, rel=1e-12
        )

    def test_against_series_oracle_grid(self):
        for lam in LAM_GRID:
            law = PoissonLaw(lam)
            for k in (1, 2, 5, 12, 40, 80):
                expected = float(oracles.mp_log_tail(lam, k))
                assert law.log_tail(k) == pytest.approx(expected, rel=1e-13), (lam, k)

    def test_tail_pmf_consistency(self):
        """P(Y>=k) - P(Y>=k+1) must reproduce the pmf across the mean boundary.

        The absolute floor covers the conditioning of the subtraction itself:
        both operands are doubles, so the difference carries an unavoidable
        error near machine epsilon times the larger tail.
        """
        for lam in LAM_GRID:
            law = PoissonLaw(lam)
            for k in range(0, 41):
                tail_k = math.exp(law.log_tail(k))
                lhs = tail_k - math.exp(law.log_tail(k + 1))
                rhs = math.exp(law.log_pmf(k))
                floor = 4e-16 * tail_k
                assert abs(lhs - rhs) <= 1e-12 * rhs + floor, (lam, k, lhs, rhs)


class TestXi:
    @pytest.mark.parametrize("lam,k,expected", [(4.0, 4, 0.0), (4.0, 8, 2.0), (1.0, 5, 4.0)])
    def test_values(self, lam, k, expected):
        assert PoissonLaw(lam).xi(k) == pytest.approx(expected, abs=1e-15)

    def test_rejects_left_tail(self):
        with pytest.raises(ValueError, match="right-tail only"):
            PoissonLaw(4.0).xi(3)


class TestDifferenceBoundSeries:
    def test_unit_case_telescopes_to_one(self):
        # 50-term rational oracle: sum (j+1)/(j+2)! = 1 - 1/(terms+1)!
        oracle = float(oracles.series_partial_rational(Fraction(1), 1, 50))
        assert difference_bound_series(1.0, 1) == pytest.approx(1.0, abs=1e-12)
        assert difference_bound_series(1.0, 1) == pytest.approx(oracle, rel=1e-12)

    def test_vanishing_mean_keeps_first_term(self):
        assert difference_bound_series(1e-14, 1) == pytest.approx(0.5, rel=1e-10)

    def test_large_case_against_rational_oracle(self):
        oracle = float(oracles.series_partial_rational(Fraction(10), 10, 200))
        value = difference_bound_series(10.0, 10)
        assert value < 3.0
        assert value == pytest.approx(oracle, rel=1e-13)

    def test_increasing_in_lam_at_fixed_w(self):
        for w in (3, 10, 50):
            values = [difference_bound_series(lam, w) for lam in (0.1, 0.5, 1.0, w / 2, w)]
            assert values == sorted(values), w

    def test_stabilizes_at_fixed_ratio(self):
        """At fixed lam/w the value settles as w grows (uniform-constant claim)."""
        for ratio in (0.5, 1.0):
            values = [difference_bound_series(ratio * w, w) for w in (50, 100, 200)]
            assert abs(values[2] - values[1]) < abs(values[1] - values[0]) + 1e-12
        assert difference_bound_series(200.0, 200) == pytest.approx(1.0, abs=1e-9)

    def test_rejects_w_below_lam(self):
        with pytest.raises(ValueError):
            difference_bound_series(5.0, 4)
        with pytest.raises(ValueError):
            difference_bound_series(1.0, 0)


class TestTailInequalities:
    def test_unit_ratio_case(self):
        """Closed form at lam=1, k=1: 1 - 1/e >= 1/2."""
        reports = verify_tail_inequalities(PoissonLaw(1.0), 1)
        ratio = next(r for r in reports if r.inequality == "poisson-tail-ratio")
        row = ratio.rows[0]
        assert row["rhs_shape"] == pytest.approx(1 - math.exp(-1), rel=1e-14)
        assert row["lhs"] == pytest.approx(0.5, abs=1e-15)
        assert ratio.passed

    def test_pmf_comparison_case(self):
        """Closed form at lam=1, k=2: P(Y>=2) <= P(Y=2)*3/2."""
        reports = verify_tail_inequalities(PoissonLaw(1.0), 2)
        pmf = next(r for r in reports if r.inequality == "poisson-tail-vs-pmf")
        row = next(r for r in pmf.rows if r["k"] == 2)
        assert row["lhs"] == pytest.approx(1 - 2 * math.exp(-1), rel=1e-14)
        assert row["rhs_shape"] == pytest.approx(math.exp(-1) * 3 / 4, rel=1e-14)
        assert pmf.passed

    def test_mid_mean_grid_all_pass(self):
        reports = verify_tail_inequalities(PoissonLaw(6.5), 40)
        assert all(r.passed for r in reports), [(r.inequality, r.fitted_constant) for r in reports]

    def test_floor_reports_minimum_tail(self):
        reports = verify_tail_inequalities(PoissonLaw(6.5), 40)
        floor = next(r for r in reports if r.inequality == "poisson-tail-floor")
        tails = [math.exp(PoissonLaw(6.5).log_tail(k)) for k in range(0, 7)]
        assert floor.fitted_constant == pytest.approx(min(tails), rel=1e-14)
        assert floor.sense == "lower"
