"""Exact laws: convolution, transfer matrices, rencontres, clustering table."""

import json
import math
from fractions import Fraction

import pytest

from steinpoisson import (
    ExactModeLimitError,
    MatchingModel,
    PoissonBinomialModel,
    TwoRunsModel,
    binomial_law,
    delta_condition_2runs,
    derangements,
    matching_law,
    pbt_law,
    pbt_leave_one_out,
    two_runs_enumerate,
    two_runs_joint,
    two_runs_law,
)

import oracles


class TestPoissonBinomial:
    def test_two_fair_coins(self):
        law = pbt_law(PoissonBinomialModel([Fraction(1, 2), Fraction(1, 2)]))
        assert law.masses == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))

    def test_failure_product(self):
        law = pbt_law(PoissonBinomialModel(["0.1", "0.2", "0.3"]))
        assert law.masses[0] == Fraction(9, 10) * Fraction(8, 10) * Fraction(7, 10)
        assert float(law.masses[0]) == pytest.approx(0.504)

    def test_iid_matches_binomial_closed_form(self):
        p = Fraction(1, 20)
        dp = pbt_law(PoissonBinomialModel([p] * 40))
        closed = binomial_law(40, p)
        assert dp.masses == closed.masses
        for k in (0, 3, 17, 40):
            assert closed.masses[k] == oracles.binomial_pmf(40, k, p)

    def test_masses_sum_to_one_and_mean_is_exact(self):
        model = PoissonBinomialModel([Fraction(1, 3), Fraction(2, 7), Fraction(1, 11)])
        law = pbt_law(model)
        assert sum(law.masses) == 1
        assert law.mean() == model.lam

    def test_leave_one_out(self):
        model = PoissonBinomialModel([Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)])
        loo = pbt_leave_one_out(model, 1)
        assert loo.masses == pbt_law(PoissonBinomialModel([Fraction(1, 2), Fraction(1, 5)])).masses

    def test_validation(self):
        with pytest.raises(ValueError):
            PoissonBinomialModel([Fraction(3, 2)])
        with pytest.raises(ValueError):
            PoissonBinomialModel([])
        with pytest.raises(ValueError):
            PoissonBinomialModel([0, 0])


class TestTwoRuns:
    @pytest.mark.parametrize("n,p", [(8, Fraction(1, 4)), (10, Fraction(1, 5)), (12, Fraction(1, 3))])
    def test_transfer_matrix_equals_enumeration(self, n, p):
        model = TwoRunsModel(n, p)
        assert two_runs_joint(model).masses == two_runs_enumerate(model).masses

    def test_marginal_consistency_and_cross_sweeps(self):
        """Bivariate marginal, univariate sweep, and enumeration must coincide exactly."""
        model = TwoRunsModel(9, Fraction(1, 3))
        uni = two_runs_law(model)
        joint = two_runs_joint(model)
        enum = two_runs_enumerate(model)
        assert uni.masses == joint.marginal_w().masses
        assert uni.masses == enum.marginal_w().masses

    def test_rotation_invariance(self):
        """Starting the index sweep anywhere on the cycle gives the same joint law."""
        n, p = 9, Fraction(1, 3)
        reference = two_runs_joint(TwoRunsModel(n, p)).masses
        from collections import defaultdict

        for start in (3, 7):
            acc = defaultdict(int)
            a, b = p.numerator, p.denominator
            for g in range(1 << n):
                bits = [(g >> ((i + start) % n)) & 1 for i in range(n)]
                w = sum(bits[i] & bits[(i + 1) % n] for i in range(n))
                t = sum(bits[i] & bits[(i + 1) % n] & bits[(i + 2) % n] for i in range(n))
                acc[(w, t)] += a ** sum(bits) * (b - a) ** (n - sum(bits))
            rotated = {k: Fraction(c, b**n) for k, c in acc.items() if c}
            assert rotated == reference, start

    def test_all_ones_probability(self):
        model = TwoRunsModel(7, Fraction(1, 4))
        law = two_runs_law(model)
        assert law.masses[7] == Fraction(1, 4) ** 7

    def test_mean_is_np_squared(self):
        for n, p in ((12, Fraction(1, 4)), (9, Fraction(2, 5))):
            law = two_runs_law(TwoRunsModel(n, p))
            assert law.mean() == n * p * p, (n, p)

    def test_float_mode_matches_exact(self):
        model = TwoRunsModel(30, Fraction(1, 10))
        exact = two_runs_law(model, exact=True)
        shadow = two_runs_law(model, exact=False)
        assert not shadow.exact
        for w in range(31):
            assert shadow.masses[w] == pytest.approx(float(exact.masses[w]), rel=1e-11, abs=1e-300)

    def test_exact_mode_limit(self):
        big = TwoRunsModel(65, Fraction(1, 10))
        with pytest.raises(ExactModeLimitError):
            two_runs_law(big, exact=True)
        law = two_runs_law(big)
        assert not law.exact
        huge = TwoRunsModel(80, Fraction(1, 10))
        with pytest.raises(ExactModeLimitError):
            two_runs_joint(huge)

    def test_joint_triple_never_exceeds_pairs(self):
        joint = two_runs_joint(TwoRunsModel(10, Fraction(1, 4)))
        assert all(t <= w for (w, t) in joint.masses)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            TwoRunsModel(4, Fraction(1, 4))
        with pytest.raises(ValueError):
            TwoRunsModel(12, Fraction(1, 2))
        assert not TwoRunsModel(10, Fraction(1, 4)).meets_md_hypotheses()
        assert TwoRunsModel(11, Fraction(1, 4)).meets_md_hypotheses()


class TestMatching:
    def test_derangement_numbers(self):
        assert derangements(7) == [1, 0, 1, 2, 9, 44, 265, 1854]

    def test_small_case(self):
        law = matching_law(MatchingModel(4))
        assert law.masses[0] == Fraction(9, 24)
        assert law.masses[3] == 0
        assert float(law.masses[0]) == pytest.approx(0.375)

    def test_against_permutation_enumeration(self):
        for n in range(1, 8):
            law = matching_law(MatchingModel(n))
            assert list(law.masses) == oracles.rencontres_enumerate(n), n

    def test_mean_is_one_for_every_size(self):
        for n in range(1, 12):
            assert matching_law(MatchingModel(n)).mean() == 1, n


class TestDeltaCondition:
    def test_single_run_has_no_triples(self):
        table = delta_condition_2runs(TwoRunsModel(12, Fraction(1, 4)), 3)
        assert table.entries[1] == 0

    def test_full_cycle_value(self):
        """Conditioned on the all-ones cycle, the ratio is 2/n."""
        n = 7
        table = delta_condition_2runs(TwoRunsModel(n, Fraction(1, 4)), n)
        assert table.entries[n] == Fraction(2, n)

    def test_against_bruteforce_at_n20(self):
        model = TwoRunsModel(20, Fraction(1, 5))
        table = delta_condition_2runs(model, 4)
        brute = two_runs_enumerate(model)
        for w in range(1, 5):
            expected = brute.conditional_2t_mean(w)
            expected = None if expected is None else expected / (w * w)
            assert table.entries[w] == expected, w

    def test_undefined_events_are_reported_as_none(self):
        # W = n-1 is unattainable on a cycle: n-1 adjacent pairs force n ones
        n = 8
        table = delta_condition_2runs(TwoRunsModel(n, Fraction(1, 4)), n)
        assert table.entries[n - 1] is None
        assert table.delta_star is not None

    def test_theta_validation(self):
        with pytest.raises(ValueError):
            delta_condition_2runs(TwoRunsModel(8, Fraction(1, 4)), 0)


class TestLawInterface:
    def test_tails_and_log_tail(self):
        law = matching_law(MatchingModel(4))
        assert law.tail(0) == 1
        assert law.tail(1) == Fraction(15, 24)
        assert law.tail(9) == 0
        assert law.log_tail(9) == float("-inf")
        assert law.log_tail(1) == pytest.approx(math.log(15 / 24), rel=1e-14)
        tails = law.tails()
        assert tails[0] == 1 and tails[1] == Fraction(15, 24) and tails[-1] == 0

    def test_payload_serialization(self):
        law = matching_law(MatchingModel(3))
        payload = law.to_payload("matching", {"n": 3})
        assert payload["masses"] == ["1/3", "1/2", "0/1", "1/6"]
        assert payload["mean"] == "1/1"
        text = law.to_json("matching", {"n": 3})
        assert json.loads(text)["model"] == "matching"

    def test_exact_law_validation(self):
        from steinpoisson import ExactLaw

        with pytest.raises(ValueError):
            ExactLaw((Fraction(1, 2), Fraction(1, 3)))
        with pytest.raises(ValueError):
            ExactLaw((0.5, 0.4), exact=False)
