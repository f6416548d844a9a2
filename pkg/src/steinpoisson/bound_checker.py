"""Right-tail ratio experiments and bound-shape verification.

Left-hand sides come from exact model laws; right-hand sides are the bound
shapes with every absolute constant set to one.  The checker fits the
extremal constant over a grid instead of asserting a value: the fitted
constants are the outputs, and regression brackets frozen from an oracle
run guard against implementation drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .dependence import verify_coloring_independence
from .exact_models import (
    ExactLaw,
    MatchingModel,
    PoissonBinomialModel,
    TwoRunsModel,
    binomial_law,
    matching_law,
    pbt_law,
    two_runs_law,
)
from .logspace import NEG_INF, log_fraction
from .poisson_core import PoissonLaw
from .report import BoundReport
from .stein_kernel import g1_exact

# Poisson-side expectations truncate where the Poisson tail drops below this;
# the discarded mass is added to the reported slack.
_EXPECTATION_TAIL_CUTOFF = 1e-18


@dataclass(frozen=True)
class TailRatioSup:
    """Running supremum of P(W>=r)/P(Y>=r) over integer r in [lam, k]."""

    lam: float
    k: int
    value: float


def _log_tails(law: ExactLaw) -> list[float]:
    """log P(W >= k) for k = 0..support_max+1, one suffix pass."""
    tails = law.tails()
    if law.exact:
        return [log_fraction(t) for t in tails]
    return [math.log(t) if t > 0.0 else NEG_INF for t in tails]


def tail_ratio_sup(law: ExactLaw, lam: float, k: int) -> TailRatioSup:
    """Exact tail-ratio supremum; the recursion variable of the proofs."""
    lo = math.ceil(lam)
    if k < lo:
        raise ValueError(f"require k >= ceil(lambda)={lo}, got {k}")
    poi = PoissonLaw(lam)
    log_w = _log_tails(law)
    best = 0.0
    for r in range(lo, k + 1):
        lw = log_w[r] if r < len(log_w) else NEG_INF
        if lw == NEG_INF:
            continue
        best = max(best, math.exp(lw - poi.log_tail(r)))
    return TailRatioSup(lam=lam, k=k, value=best)


def local_bound_shape(
    m: int, p_tilde: float, delta: float, lam: float, theta: float, k: int
) -> tuple[float, float]:
    """Bound shape for locally dependent sums, both summands with constants set to 1.

    Returns (m^2 * (p_tilde (1+xi^2) + delta lam (1+xi^2+xi^3/sqrt(lam))),
    (1 min 1/lam) * m^2 * exp(-theta/m)).
    """
    xi = PoissonLaw(lam).xi(k)
    main = m * m * (
        p_tilde * (1.0 + xi * xi)
        + delta * lam * (1.0 + xi * xi + xi**3 / math.sqrt(lam))
    )
    remainder = min(1.0, 1.0 / lam) * m * m * math.exp(-theta / m)
    return main, remainder


def coupling_bound_shape(delta1: float, delta2: float, lam: float, k: int) -> float:
    """(delta_1 + delta_2 lam)(1 + xi^2) with the constant set to 1."""
    xi = PoissonLaw(lam).xi(k)
    return (delta1 + delta2 * lam) * (1.0 + xi * xi)


# Rational Poisson(1) tails: enough series terms that the certified error,
# about 4/(terms+1)!, sits hundreds of orders below the smallest ratio of
# interest.  Needed because the matching law agrees with Poisson(1) to
# factorial precision, far beyond float-log resolution.
_POISSON1_SERIES_TERMS = 260


@lru_cache(maxsize=None)
def _poisson1_tail_fraction(k: int) -> Fraction:
    terms = _POISSON1_SERIES_TERMS
    e_inv = sum(
        (Fraction((-1) ** i, math.factorial(i)) for i in range(terms + 1)), Fraction(0)
    )
    s = sum((Fraction(1, math.factorial(j)) for j in range(k, terms + 1)), Fraction(0))
    return e_inv * s


def _matching_ratio_row(law: ExactLaw, n: int, k: int) -> dict:
    tail_w = law.tail(k)
    tail_y = _poisson1_tail_fraction(k)
    shape = Fraction(k * k, n)
    if tail_w == 0:
        return {
            "k": k,
            "xi": float(k - 1),
            "ratio_minus_1": None,
            "lhs": None,
            "rhs_shape": float(shape),
            "ratio": None,
            "included": False,
        }
    ratio_minus_1 = tail_w / tail_y - 1
    lhs = abs(ratio_minus_1)
    return {
        "k": k,
        "xi": float(k - 1),
        "ratio_minus_1": float(ratio_minus_1),
        "lhs": float(lhs),
        "rhs_shape": float(shape),
        "ratio": float(lhs / shape),
        "included": True,
    }


def _model_law_and_shape(model) -> tuple[ExactLaw, float, Callable[[int, float], float], str]:
    if isinstance(model, PoissonBinomialModel):
        lam = float(model.lam)
        p_tilde = float(model.p_tilde)
        law = binomial_law(model.n, model.p[0]) if model.iid() else pbt_law(model)

        def shape(k: int, xi: float) -> float:
            return p_tilde * (1.0 + xi * xi)

        return law, lam, shape, "ratio-pbt"
    if isinstance(model, MatchingModel):
        law = matching_law(model)
        n = model.n

        def shape(k: int, xi: float) -> float:
            return k * k / n

        return law, 1.0, shape, "ratio-matching"
    if isinstance(model, TwoRunsModel):
        law = two_runs_law(model)
        lam = float(model.lam)
        p = float(model.p)
        sqrt_n = math.sqrt(model.n)

        def shape(k: int, xi: float) -> float:
            return p + p * xi * xi + xi**3 / sqrt_n

        return law, lam, shape, "ratio-two-runs"
    raise ValueError(f"unsupported model type: {type(model).__name__}")


def ratio_experiment(
    model,
    k_range: Sequence[int] | None = None,
    smallness: float | None = None,
    budget: float | None = None,
) -> BoundReport:
    """|P(W>=k)/P(Y>=k) - 1| against the model's bound shape, constant fitted.

    Unattainable k (zero mass beyond the support) are excluded and counted:
    there the ratio is 0/positive and says nothing about the constant.  When
    ``smallness`` is given the fit is restricted to grid points whose shape
    value stays below it, mirroring the smallness hypothesis under which the
    bounds hold; all rows are still reported.

    The matching law agrees with Poisson(1) to factorial precision, so its
    rows are computed in exact rational arithmetic (rational tail series for
    Poisson(1)); the other models' ratios are comfortably above float-log
    resolution.
    """
    law, lam, shape_fn, name = _model_law_and_shape(model)
    poi = PoissonLaw(lam)
    lo = math.ceil(lam)
    if k_range is None:
        hi = min(law.support_max, math.ceil(lam + 8.0 * math.sqrt(lam)))
        k_range = range(lo, hi + 1)
    rational_route = isinstance(model, MatchingModel)
    log_w = None if rational_route else _log_tails(law)
    rows = []
    excluded = 0
    fitted = 0.0
    worst = None
    for k in k_range:
        if k < lo:
            raise ValueError(f"k range must start at ceil(lambda)={lo}, got {k}")
        if rational_route:
            row = _matching_ratio_row(law, model.n, k)
            if not row["included"]:
                excluded += 1
                rows.append(row)
                continue
            row["included"] = smallness is None or row["rhs_shape"] <= smallness
        else:
            xi = poi.xi(k)
            shape = shape_fn(k, xi)
            lw = log_w[k] if k < len(log_w) else NEG_INF
            if lw == NEG_INF:
                excluded += 1
                rows.append(
                    {
                        "k": k,
                        "xi": xi,
                        "ratio_minus_1": None,
                        "lhs": None,
                        "rhs_shape": shape,
                        "ratio": None,
                        "included": False,
                    }
                )
                continue
            ratio_minus_1 = math.expm1(lw - poi.log_tail(k))
            lhs = abs(ratio_minus_1)
            row = {
                "k": k,
                "xi": xi,
                "ratio_minus_1": ratio_minus_1,
                "lhs": lhs,
                "rhs_shape": shape,
                "ratio": lhs / shape if shape > 0 else math.inf,
                "included": smallness is None or shape <= smallness,
            }
        rows.append(row)
        if row["included"] and row["ratio"] > fitted:
            fitted = row["ratio"]
            worst = row
    notes = f"shape region: smallness={smallness}" if smallness is not None else ""
    if not law.exact:
        notes = (notes + "; " if notes else "") + "law: float transfer matrix (non-exact)"
    return BoundReport(
        inequality=name,
        rows=rows,
        fitted_constant=fitted,
        worst_point=worst,
        budget=budget,
        excluded=excluded,
        notes=notes,
    )


def bennett_hoeffding_check(
    model: PoissonBinomialModel,
    x_grid: Sequence[float],
    a: float | None = None,
    b_sq: float | None = None,
) -> BoundReport:
    """Exponential tail bound for the centered indicator sum, exact left side.

    The summands X_i - p_i are bounded above by a = max(1-p_i) with zero
    means and total variance B^2 = sum p_i(1-p_i).  Every x is checked
    against the full product form; x > 4B^2/a is additionally checked
    against the simplified form exp(-(x/2a) log(1+ax/B^2)).
    """
    law = binomial_law(model.n, model.p[0]) if model.iid() else pbt_law(model)
    lam = model.lam
    if a is None:
        a = float(max(1 - p for p in model.p))
    if b_sq is None:
        b_sq = float(sum(p * (1 - p) for p in model.p))
    if a <= 0:
        raise ValueError(f"the upper bound a must be positive, got {a}")
    rows = []
    for x in x_grid:
        if x <= 0:
            raise ValueError(f"grid points must be positive, got {x}")
        # P(sum (X_i - p_i) >= x) = P(W >= lam + x)
        threshold = lam + (Fraction(str(x)) if isinstance(x, float) else Fraction(x))
        k = math.ceil(threshold)
        tail = float(law.tail(k))
        u = a * x / b_sq
        full = math.exp(-(b_sq / (a * a)) * ((1.0 + u) * math.log1p(u) - u))
        simplified_applies = x > 4.0 * b_sq / a
        simplified = (
            math.exp(-(x / (2.0 * a)) * math.log1p(u)) if simplified_applies else None
        )
        bound = simplified if simplified_applies else full
        rows.append(
            {
                "x": x,
                "k": k,
                "lhs": tail,
                "rhs_shape": bound,
                "full_bound": full,
                "simplified_bound": simplified,
                "simplified_applies": simplified_applies,
            }
        )
    return BoundReport.fit(
        "bennett-hoeffding",
        rows,
        budget=1.0,
        notes="shape is the simplified bound where valid, else the full product form",
    )


def tail_expectation_check(
    model: TwoRunsModel, x_grid: Sequence[float], verify_coloring: bool = False
) -> list[BoundReport]:
    """E[W I(W > x)] for the 2-runs sum against m exp(-(x/8m) log(1+x/(2m lam))).

    The constant is fitted, never asserted.  With ``verify_coloring`` the
    premise behind the bound is checked too: the cycle splits into three
    residue classes whose indicator families must each be independent
    (exact enumeration, so only at enumerable sizes).
    """
    law = two_runs_law(model)
    lam = float(model.lam)
    m = 3
    rows = []
    for x in x_grid:
        if x <= 0:
            raise ValueError(f"grid points must be positive, got {x}")
        lhs = float(
            sum(
                (Fraction(w) * mass for w, mass in enumerate(law.masses) if w > x),
                Fraction(0),
            )
        )
        shape = m * math.exp(-(x / (8.0 * m)) * math.log1p(x / (2.0 * m * lam)))
        rows.append({"x": x, "lhs": lhs, "rhs_shape": shape})
    reports = [
        BoundReport.fit(
            "tail-expectation",
            rows,
            budget=None,
            notes="fitted constant for E[W I(W>x)] <= C m exp(-(x/8m)log(1+x/(2m lam)))",
        )
    ]
    if verify_coloring:
        ind = verify_coloring_independence(model)
        reports.append(
            BoundReport(
                inequality="tail-expectation-coloring",
                rows=[{"classes": 3, "lhs": 0.0 if ind.passed else 1.0, "rhs_shape": 1.0,
                       "ratio": 0.0 if ind.passed else math.inf}],
                fitted_constant=0.0 if ind.passed else math.inf,
                worst_point=None,
                budget=1.0,
                notes=ind.notes,
            )
        )
    return reports


def _poisson_truncation(lam: float, start: int) -> int:
    poi = PoissonLaw(lam)
    cut = start
    while math.exp(poi.log_tail(cut + 1)) >= _EXPECTATION_TAIL_CUTOFF:
        cut += 1
    return cut


def _expectation_poisson(lam: float, fn: Callable[[int], float], w_cut: int) -> float:
    poi = PoissonLaw(lam)
    return math.fsum(fn(w) * math.exp(poi.log_pmf(w)) for w in range(w_cut + 1))


def _expectation_law(law: ExactLaw, fn: Callable[[int], float]) -> float:
    return math.fsum(fn(w) * float(m) for w, m in enumerate(law.masses))


def _check_non_decreasing(fn: Callable[[int], float], k: int, name: str) -> None:
    prev = fn(0)
    if prev < 0:
        raise ValueError(f"test function {name} must be non-negative on 0..k")
    for w in range(1, k + 1):
        cur = fn(w)
        if cur < prev - 1e-12:
            raise ValueError(f"test function {name} must be non-decreasing on 0..k")
        prev = cur


def truncated_expectation_check(
    law: ExactLaw,
    lam: float,
    k: int,
    extra_g: Sequence[tuple[str, Callable[[int], float]]] = (),
) -> list[BoundReport]:
    """Truncated-expectation comparisons between W and the Poisson law.

    For each non-decreasing non-negative g from the built-in family (the
    increment function itself, monomials, threshold indicators) plus any
    extras, fit C in  E g(W ^ k) <= C (eta_k + 1) E g(Y ^ k).  Then fit the
    three increment-moment bounds whose shapes are

        1/lam + (k+1-lam)_+^2 / lam^2,
        1   + (k-lam)_+^2 / lam,
        lam + (k-lam)_+^2 + (k-lam)_+^3 / lam

    for E g1((W+1)^k), E[(W^k) g1(W^k)], E[(W^k)^2 g1(W^k)] respectively.
    """
    if k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k}")
    lam_fr = Fraction(lam) if not isinstance(lam, float) else Fraction(str(lam))
    g1_vals = [float(g1_exact(lam_fr, w)) for w in range(k + 2)]

    def g1_fn(w: int) -> float:
        return g1_vals[min(w, k + 1)]

    eta = tail_ratio_sup(law, float(lam), max(k, math.ceil(lam))).value
    eta_plus = eta + 1.0
    w_cut = _poisson_truncation(float(lam), k)

    family: list[tuple[str, Callable[[int], float]]] = [
        ("g1", lambda w: g1_vals[min(w, k + 1)]),
        ("w", lambda w: float(w)),
        ("w^2", lambda w: float(w * w)),
        ("indicator", lambda w: 1.0 if w >= max(k // 2, 1) else 0.0),
    ]
    family.extend(extra_g)

    reports: list[BoundReport] = []
    rows = []
    for name, fn in family:
        _check_non_decreasing(fn, k, name)
        lhs = _expectation_law(law, lambda w: fn(min(w, k)))
        rhs = eta_plus * _expectation_poisson(float(lam), lambda w: fn(min(w, k)), w_cut)
        rows.append({"g": name, "k": k, "lhs": lhs, "rhs_shape": rhs})
    reports.append(
        BoundReport.fit(
            "truncated-expectation",
            rows,
            budget=None,
            slack=_EXPECTATION_TAIL_CUTOFF,
            notes="E g(W^k) vs (eta_k+1) E g(Y^k), fitted per test function",
        )
    )

    lamf = float(lam)
    excess = max(k - lamf, 0.0)
    excess1 = max(k + 1 - lamf, 0.0)
    moment_specs = [
        (
            "increment-moment-0",
            _expectation_law(law, lambda w: g1_fn(min(w + 1, k))),
            1.0 / lamf + excess1 * excess1 / (lamf * lamf),
        ),
        (
            "increment-moment-1",
            _expectation_law(law, lambda w: min(w, k) * g1_fn(min(w, k))),
            1.0 + excess * excess / lamf,
        ),
        (
            "increment-moment-2",
            _expectation_law(law, lambda w: min(w, k) ** 2 * g1_fn(min(w, k))),
            lamf + excess * excess + excess**3 / lamf,
        ),
    ]
    for name, lhs, shape in moment_specs:
        reports.append(
            BoundReport.fit(
                name,
                [{"k": k, "lhs": lhs, "rhs_shape": eta_plus * shape}],
                budget=None,
            )
        )
    return reports
