"""Size-bias couplings: exact jump laws, the defining identity, sampling, TV bound."""

import math
from fractions import Fraction

import numpy as np
import pytest

from steinpoisson import (
    ExactModeLimitError,
    MatchingModel,
    PoissonBinomialModel,
    RngStream,
    matching_coupling_enumerate,
    matching_coupling_sample,
    matching_law,
    pbt_coupling_delta_law,
    pbt_law,
    pbt_size_bias_law,
    size_bias_identity_check,
    total_variation_poisson,
    verify_tv_bound,
)

import oracles


class TestIdentityCheck:
    def test_two_fair_coins(self):
        model = PoissonBinomialModel([Fraction(1, 2), Fraction(1, 2)])
        report = size_bias_identity_check(pbt_law(model), pbt_size_bias_law(model), 6)
        assert report.passed

    def test_matching_from_enumeration(self):
        delta_law = matching_coupling_enumerate(MatchingModel(5))
        report = size_bias_identity_check(delta_law.marginal_w(), delta_law.ws_law(), 6)
        assert report.passed

    def test_detects_wrong_pairing(self):
        """The original law is not its own size-bias law (W^s >= 1 a.s.)."""
        law = pbt_law(PoissonBinomialModel([Fraction(1, 2), Fraction(1, 2)]))
        report = size_bias_identity_check(law, law, 6)
        assert not report.passed
        assert report.failing_degree is not None

    def test_rejects_float_laws(self):
        from steinpoisson import ExactLaw

        law = pbt_law(PoissonBinomialModel([Fraction(1, 2)]))
        shadow = ExactLaw((0.5, 0.5), exact=False)
        with pytest.raises(ValueError):
            size_bias_identity_check(law, shadow)


class TestPbtCoupling:
    def test_jump_is_never_negative(self):
        model = PoissonBinomialModel([Fraction(1, 10), Fraction(1, 5), Fraction(3, 10)])
        delta_law = pbt_coupling_delta_law(model)
        assert all(d >= 0 for (_, d) in delta_law.masses)
        assert delta_law.fitted_delta1() == 0

    def test_two_coin_jump_probability(self):
        delta_law = pbt_coupling_delta_law(PoissonBinomialModel([Fraction(1, 2)] * 2))
        up = sum((m for (_, d), m in delta_law.masses.items() if d == 1), Fraction(0))
        assert up == Fraction(1, 2)

    def test_marginal_matches_model_law(self):
        model = PoissonBinomialModel([Fraction(1, 7), Fraction(2, 5), Fraction(1, 3)])
        assert pbt_coupling_delta_law(model).marginal_w().masses == pbt_law(model).masses

    def test_fitted_slope_never_exceeds_analytic_value(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(2, 9))
            probs = [Fraction(int(rng.integers(1, 99)), 100) for _ in range(n)]
            model = PoissonBinomialModel(probs)
            delta_law = pbt_coupling_delta_law(model)
            fitted = delta_law.fitted_delta2()
            assert fitted is not None
            assert fitted <= model.p_tilde / model.lam, probs

    def test_zero_probability_indicator(self):
        """Indicators that never fire drop out of the pick but stay in the sum."""
        model = PoissonBinomialModel([Fraction(0), Fraction(1, 2)])
        delta_law = pbt_coupling_delta_law(model)
        marginal = delta_law.marginal_w().masses
        full = pbt_law(model).masses
        assert full[: len(marginal)] == marginal
        assert all(m == 0 for m in full[len(marginal) :])
        assert delta_law.fitted_delta2() == model.p_tilde / model.lam
        report = size_bias_identity_check(delta_law.marginal_w(), delta_law.ws_law(), 6)
        assert report.passed

    def test_identity_holds_for_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            n = int(rng.integers(2, 8))
            probs = [Fraction(int(rng.integers(1, 99)), 100) for _ in range(n)]
            model = PoissonBinomialModel(probs)
            delta_law = pbt_coupling_delta_law(model)
            report = size_bias_identity_check(delta_law.marginal_w(), delta_law.ws_law(), 6)
            assert report.passed, probs


class TestMatchingCoupling:
    def test_against_explicit_rewiring_oracle(self):
        for n in (3, 4, 5, 6):
            assert (
                matching_coupling_enumerate(MatchingModel(n)).masses
                == oracles.matching_coupling_enumerate_oracle(n)
            ), n

    def test_conditional_up_jump_is_w_over_n(self):
        for n in (4, 6, 8):
            delta_law = matching_coupling_enumerate(MatchingModel(n))
            law = delta_law.marginal_w()
            for w in range(law.support_max + 1):
                if law.masses[w] == 0:
                    continue
                assert delta_law.conditional(1, w) == Fraction(w, n), (n, w)

    def test_conditional_down_jump_formula(self):
        """P(D=-1 | W=w) = m(m-1) D_{m-2} / (n D_m) with m = n-w: the chance
        that a uniform index sits in a 2-cycle of the derangement part.  The
        bound 2/n is attained exactly at m = 2."""
        from steinpoisson import derangements

        for n in (5, 6, 7):
            delta_law = matching_coupling_enumerate(MatchingModel(n))
            law = delta_law.marginal_w()
            d = derangements(n)
            for w in range(law.support_max + 1):
                if law.masses[w] == 0:
                    continue
                m = n - w
                expected = (
                    Fraction(m * (m - 1) * d[m - 2], n * d[m]) if m >= 2 else Fraction(0)
                )
                observed = delta_law.conditional(-1, w)
                assert observed == expected, (n, w)
                assert observed <= Fraction(2, n), (n, w)
            assert delta_law.fitted_delta1() == Fraction(2, n), n

    def test_jump_support_and_marginal(self):
        delta_law = matching_coupling_enumerate(MatchingModel(6))
        assert {d for (_, d) in delta_law.masses} <= {-1, 0, 1}
        assert delta_law.marginal_w().masses == matching_law(MatchingModel(6)).masses

    def test_enumeration_limit(self):
        with pytest.raises(ExactModeLimitError):
            matching_coupling_enumerate(MatchingModel(10))


class TestSampler:
    def test_bit_reproducible_for_fixed_seed(self):
        a = matching_coupling_sample(MatchingModel(6), RngStream(42), 50_000)
        b = matching_coupling_sample(MatchingModel(6), RngStream(42), 50_000)
        assert a == b

    def test_worker_split_reproducible(self):
        a = matching_coupling_sample(MatchingModel(6), RngStream(9), 50_000, workers=3)
        b = matching_coupling_sample(MatchingModel(6), RngStream(9), 50_000, workers=3)
        assert a == b

    def test_matches_enumeration_within_standard_errors(self):
        """Deterministic at this seed: the observed deviation is 1.16 SEs."""
        exact = matching_coupling_enumerate(MatchingModel(6))
        stats = matching_coupling_sample(MatchingModel(6), RngStream(42), 1_000_000)
        target = float(exact.e_abs_delta())
        assert abs(stats.e_abs_diff - target) < 3 * stats.e_abs_diff_se

    def test_up_jump_rate_approaches_one_over_n(self):
        """P(Delta=1) = E W / n = 1/n for the matching coupling."""
        n = 5
        stats = matching_coupling_sample(MatchingModel(n), RngStream(3), 400_000)
        exact = matching_coupling_enumerate(MatchingModel(n))
        up = float(
            sum((m for (_, d), m in exact.masses.items() if d == 1), Fraction(0))
        )
        assert up == pytest.approx(1.0 / n, abs=1e-12)

    def test_seed_validation(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            matching_coupling_sample(MatchingModel(5), RngStream(1), 0)


class TestTvBound:
    def test_uniform_small_probabilities(self):
        model = PoissonBinomialModel([Fraction(1, 10)] * 10)
        report = verify_tv_bound(pbt_coupling_delta_law(model))
        assert report.passed
        rhs = (1 - math.exp(-1.0)) * 0.1
        assert report.rows[0]["rhs_shape"] == pytest.approx(rhs, rel=1e-12)

    def test_degenerate_point_mass(self):
        """A single sure indicator: TV(delta_1, Poi(1)) = 1 - 1/e with E|D| = 1."""
        model = PoissonBinomialModel([Fraction(1, 1)])
        delta_law = pbt_coupling_delta_law(model)
        assert delta_law.e_abs_delta() == 1
        report = verify_tv_bound(delta_law)
        tv = report.rows[0]["lhs"]
        assert tv == pytest.approx(1 - math.exp(-1), rel=1e-10)
        assert report.passed

    def test_matching_both_sides_from_enumeration(self):
        report = verify_tv_bound(matching_coupling_enumerate(MatchingModel(7)))
        assert report.passed

    def test_tv_against_direct_sum(self):
        model = PoissonBinomialModel([Fraction(1, 4), Fraction(1, 3)])
        law = pbt_law(model)
        lam = float(model.lam)
        tv, slack = total_variation_poisson(law, lam)
        pmf = lambda w: math.exp(-lam) * lam**w / math.factorial(w)
        model_mass = lambda w: float(law.masses[w]) if w <= law.support_max else 0.0
        direct = 0.5 * sum(abs(model_mass(w) - pmf(w)) for w in range(80)) + 0.5 * (
            1 - sum(pmf(w) for w in range(80))
        )
        assert tv == pytest.approx(direct, abs=1e-12)
        assert slack < 1e-17
