"""Closed-form solution of the Poisson Stein equation for right-tail indicators.

For a fixed integer threshold k >= lambda and h(w) = I{w >= k}, the bounded
solution of

    lam * f(w+1) - w * f(w) = h(w) - E h(Y),      Y ~ Poi(lam),

is negative everywhere and splits into two branches:

    f(w) = -e^lam (w-1)!/lam^w * (1 - P(Y>=k)) * P(Y>=w),   w >= k,
    f(w) = -e^lam (w-1)!/lam^w * P(Y>=k) * P(Y<=w-1),       0 < w <= k,

with f(0) := f(1).  The factor (w-1)!/lam^w overflows linear floats near
w ~ 170, so the table stores log magnitudes (the sign is uniformly
negative) and materializes linear values only on demand.

The increment g1(w) = f(w) - f(w+1) scaled by P(Y>=k) on the lower branch
is evaluated by three independent routes that must agree; the exact
rational route doubles as the in-repo oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .logspace import NEG_INF, log1mexp, log_sub, log_sum
from .poisson_core import PoissonLaw, difference_bound_series, poisson_tables
from .report import BoundReport

G1_METHODS = ("factorial", "integral_series", "stein_diff")

# Relative agreement of log magnitudes beyond which direct subtraction is
# considered cancellation-unsafe and the series route takes over.
_CANCEL_GUARD = 1e-8


def default_w_max(lam: float, k: int) -> int:
    """Table extent covering all w with non-negligible mass at desk scale."""
    return k + math.ceil(10.0 * math.sqrt(lam)) + 50


@dataclass(frozen=True)
class SteinSolution:
    """Tabulated f(w) for one (lam, k) pair; immutable and shareable.

    ``log_abs[w]`` is log|f(w)| for 0 <= w <= w_max; f(w) < 0 throughout.
    """

    lam: float
    k: int
    w_max: int
    log_abs: tuple[float, ...]
    log_tail_k: float

    def value(self, w: int) -> float:
        """f(w) as a linear float (bounded, so this cannot overflow)."""
        if not 0 <= w <= self.w_max:
            raise ValueError(f"w must lie in 0..{self.w_max}, got {w}")
        return -math.exp(self.log_abs[w])

    def forward_diff(self, w: int) -> float:
        """f(w+1) - f(w) by signed log-space subtraction.

        When the two magnitudes agree beyond eight digits the difference
        switches to the series representation of the increment, which has
        no cancellation.
        """
        if not 1 <= w < self.w_max:
            raise ValueError(f"w must lie in 1..{self.w_max - 1}, got {w}")
        la, lb = self.log_abs[w], self.log_abs[w + 1]
        if la == NEG_INF and lb == NEG_INF:
            return 0.0
        hi, lo = max(la, lb), min(la, lb)
        if lo - hi > -_CANCEL_GUARD:
            return self._series_diff(w)
        magnitude = math.exp(log_sub(hi, lo))
        # f(w+1) - f(w) = |f(w)| - |f(w+1)|
        return magnitude if la > lb else -magnitude

    def _series_diff(self, w: int) -> float:
        if w >= self.k:
            scale = math.exp(log1mexp(self.log_tail_k))
            return scale * difference_bound_series(self.lam, w) / w
        return -math.exp(self.log_tail_k + _log_g1_series(self.lam, w))

    def residual(self, w: int) -> float:
        """lam*f(w+1) - w*f(w) - (I{w>=k} - P(Y>=k)); zero for the true solution."""
        if not 1 <= w < self.w_max:
            raise ValueError(f"w must lie in 1..{self.w_max - 1}, got {w}")
        rhs = (1.0 if w >= self.k else 0.0) - math.exp(self.log_tail_k)
        return self.lam * self.value(w + 1) - w * self.value(w) - rhs


def stein_solution(lam: float, k: int, w_max: int | None = None) -> SteinSolution:
    """Tabulate the bounded solution for threshold k on 0..w_max."""
    law = PoissonLaw(lam)
    if k < lam:
        raise ValueError(f"right-tail only: require k >= lambda, got k={k}, lambda={lam}")
    if w_max is None:
        w_max = default_w_max(lam, k)
    if w_max < k + 2:
        raise ValueError(f"w_max must be at least k+2={k + 2}, got {w_max}")
    _, log_tail, log_cdf = poisson_tables(lam, w_max)
    log_tail_k = log_tail[k]
    log_one_minus_tail_k = log1mexp(log_tail_k) if log_tail_k < 0.0 else NEG_INF

    log_abs = [0.0] * (w_max + 1)
    log_lam = math.log(lam)
    for w in range(1, w_max + 1):
        prefix = lam + math.lgamma(w) - w * log_lam
        if w <= k:
            log_abs[w] = prefix + log_tail_k + (log_cdf[w - 1] if w >= 1 else NEG_INF)
        else:
            log_abs[w] = prefix + log_one_minus_tail_k + log_tail[w]
    log_abs[0] = log_abs[1]
    return SteinSolution(
        lam=lam, k=k, w_max=w_max, log_abs=tuple(log_abs), log_tail_k=log_tail_k
    )


def forward_diff(sol: SteinSolution, w: int) -> float:
    """f(w+1) - f(w); positive for w >= k, non-positive below."""
    return sol.forward_diff(w)


def _log_g1_series(lam: float, w: int) -> float:
    """log of sum_{j=0}^{w-1} C(w-1,j) (j+1)! / lam^(j+2)."""
    if w == 0:
        return NEG_INF
    log_lam = math.log(lam)
    terms = [
        math.lgamma(w) - math.lgamma(j + 1) - math.lgamma(w - j) + math.lgamma(j + 2) - (j + 2) * log_lam
        for j in range(w)
    ]
    return log_sum(terms)


def g1(lam: float, w: int, method: str = "integral_series") -> float:
    """Increment function controlling Stein-solution differences below the threshold.

    Three independent evaluations are exposed and must agree:

    * ``factorial``: e^lam w!/lam^(w+1) P(Y<=w) - e^lam (w-1)!/lam^w P(Y<=w-1);
    * ``integral_series``: the binomial expansion of
      integral_0^inf x (1+x)^(w-1) e^(-lam x) dx, a polynomial in 1/lam;
    * ``stein_diff``: (f(w) - f(w+1)) / P(Y>=k) from a tabulated solution
      with any threshold k > w.

    g1(0) = 0 by definition; the function is non-negative and non-decreasing.
    """
    if w < 0:
        raise ValueError(f"w must be a non-negative integer, got {w}")
    if method not in G1_METHODS:
        raise ValueError(f"unknown g1 method {method!r}; expected one of {G1_METHODS}")
    if w == 0:
        return 0.0
    if method == "integral_series":
        return math.exp(_log_g1_series(lam, w))
    if method == "factorial":
        _, _, log_cdf = poisson_tables(lam, w)
        log_lam = math.log(lam)
        t1 = lam + math.lgamma(w + 1) - (w + 1) * log_lam + log_cdf[w]
        t2 = lam + math.lgamma(w) - w * log_lam + (log_cdf[w - 1] if w >= 1 else NEG_INF)
        return math.exp(log_sub(t1, t2))
    k = max(math.ceil(lam), w + 1)
    sol = stein_solution(lam, k, w_max=max(k + 2, w + 2))
    # f(w) - f(w+1) = |f(w+1)| - |f(w)| > 0 below the threshold
    return math.exp(log_sub(sol.log_abs[w + 1], sol.log_abs[w]) - sol.log_tail_k)


def g1_exact(lam: Fraction, w: int) -> Fraction:
    """Exact rational value of g1 via the series route; the in-repo oracle."""
    if w < 0:
        raise ValueError(f"w must be a non-negative integer, got {w}")
    lam = Fraction(lam)
    if w == 0:
        return Fraction(0)
    total = Fraction(0)
    for j in range(w):
        total += Fraction(math.comb(w - 1, j) * math.factorial(j + 1)) / lam ** (j + 2)
    return total


def g1_envelope(lam: float, w: int) -> float:
    """Upper envelope 1/lam + (w-1)!*(w-lam)_+ * e^lam / lam^(w+1) for w >= 1."""
    if w < 1:
        raise ValueError(f"envelope is defined for w >= 1, got {w}")
    excess = max(w - lam, 0.0)
    if excess == 0.0:
        return 1.0 / lam
    log_term = math.lgamma(w) + math.log(excess) + lam - (w + 1) * math.log(lam)
    return 1.0 / lam + math.exp(log_term)


def verify_g1_bound(lam: float, w_max: int) -> list[BoundReport]:
    """Check the envelope bound and monotonicity of g1 on 1..w_max."""
    if w_max < 1:
        raise ValueError(f"w_max must be a positive integer, got {w_max}")
    values = [g1(lam, w) for w in range(w_max + 2)]
    bound_rows = [
        {"w": w, "lhs": values[w], "rhs_shape": g1_envelope(lam, w)}
        for w in range(1, w_max + 1)
    ]
    envelope = BoundReport.fit("g1-envelope", bound_rows, budget=1.0, slack=1e-12)
    mono_rows = [
        {"w": w, "lhs": values[w], "rhs_shape": values[w + 1]}
        for w in range(1, w_max + 1)
    ]
    monotone = BoundReport.fit(
        "g1-monotone", mono_rows, budget=1.0, slack=1e-12,
        notes="lhs=g1(w), shape=g1(w+1); non-decreasing means ratio <= 1",
    )
    return [envelope, monotone]


def verify_solution(lam: float, k: int, w_max: int | None = None) -> list[BoundReport]:
    """Residual, sign, and difference-bound checks for one tabulated solution.

    Reports:

    * ``stein-residual``: |lam f(w+1) - w f(w) - (I{w>=k} - P(Y>=k))|
      against an absolute 1e-10 budget;
    * ``stein-diff-global``: |f(w+1)-f(w)| <= (1-e^-lam)/lam;
    * ``stein-diff-over-threshold``: 0 < f(w+1)-f(w) <= C/w for w >= k,
      fit-only (C is reported, never assumed).
    """
    sol = stein_solution(lam, k, w_max)
    residual_rows = [
        {"w": w, "lhs": abs(sol.residual(w)), "rhs_shape": 1.0}
        for w in range(1, sol.w_max)
    ]
    residual = BoundReport.fit("stein-residual", residual_rows, budget=1e-10)

    cap = (1.0 - math.exp(-lam)) / lam
    diffs = [sol.forward_diff(w) for w in range(1, sol.w_max)]
    global_rows = [
        {"w": w, "lhs": abs(d), "rhs_shape": cap}
        for w, d in zip(range(1, sol.w_max), diffs)
    ]
    global_bound = BoundReport.fit("stein-diff-global", global_rows, budget=1.0, slack=1e-12)

    over_rows = []
    positivity_failures = 0
    for w, d in zip(range(1, sol.w_max), diffs):
        if w < k:
            continue
        if d <= 0.0:
            positivity_failures += 1
        over_rows.append({"w": w, "lhs": d, "rhs_shape": 1.0 / w})
    over = BoundReport.fit(
        "stein-diff-over-threshold",
        over_rows,
        budget=None,
        notes=f"fitted constant is sup of w*(f(w+1)-f(w)) for w >= k; "
        f"positivity failures: {positivity_failures}",
    )
    if positivity_failures:
        over.fitted_constant = math.inf
    return [residual, global_bound, over]
