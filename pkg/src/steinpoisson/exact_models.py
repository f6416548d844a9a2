"""Exact finite-support laws for indicator-sum models.

Three models are supported: independent indicator sums (Poisson-binomial
trials), adjacent-pair counts in a cyclic Bernoulli sequence (2-runs), and
fixed points of a uniform random permutation (matching).  All laws are
computed in exact rational arithmetic with big integers; floats appear only
at the reporting boundary.  Moderate-deviation ratios divide two tiny
numbers, so float-backed laws would invalidate constant fitting.

Internally, rational masses with a common denominator are carried as bare
integer numerators (no per-step gcd normalization), which keeps the
transfer-matrix sweeps fast.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .logspace import NEG_INF, log_fraction

# Beyond this cycle length the bivariate transfer matrix switches off and the
# univariate sweep falls back to float weights (flagged non-exact).
TWO_RUNS_EXACT_LIMIT = 64


class ExactModeLimitError(ValueError):
    """An exact-arithmetic operation was asked to exceed its design size."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class PoissonBinomialModel:
    """Independent indicators with success probabilities ``p``."""

    p: tuple[Fraction, ...]

    def __init__(self, p: Sequence) -> None:
        probs = tuple(_as_fraction(v) for v in p)
        if not probs:
            raise ValueError("at least one success probability is required")
        for v in probs:
            if not 0 <= v <= 1:
                raise ValueError(f"success probabilities must lie in [0,1], got {v}")
        if sum(probs) == 0:
            raise ValueError("mean must be positive; all probabilities are zero")
        object.__setattr__(self, "p", probs)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def lam(self) -> Fraction:
        return sum(self.p, Fraction(0))

    @property
    def p_tilde(self) -> Fraction:
        return max(self.p)

    def iid(self) -> bool:
        return len(set(self.p)) == 1


@dataclass(frozen=True)
class TwoRunsModel:
    """Adjacent-pair indicator sum on a cycle of i.i.d. Bernoulli(p) bits.

    The law is well defined for any n >= 5 (below that the wraparound
    neighborhoods collide); the moderate-deviation hypotheses additionally
    ask for n > 10, exposed as :meth:`meets_md_hypotheses`.
    """

    n: int
    p: Fraction

    def __init__(self, n: int, p) -> None:
        p = _as_fraction(p)
        if n < 5:
            raise ValueError(f"cycle length must be at least 5, got {n}")
        if not 0 < p < Fraction(1, 2):
            raise ValueError(f"success probability must lie in (0, 1/2), got {p}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)

    @property
    def lam(self) -> Fraction:
        return self.n * self.p * self.p

    def meets_md_hypotheses(self) -> bool:
        return self.n > 10


@dataclass(frozen=True)
class MatchingModel:
    """Number of fixed points of a uniform permutation of size n; mean is 1 exactly."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"permutation size must be positive, got {self.n}")

    @property
    def lam(self) -> Fraction:
        return Fraction(1)


@dataclass(frozen=True)
class ExactLaw:
    """Finite-support pmf on 0..w_max with rational masses (or float shadow masses)."""

    masses: tuple
    exact: bool = True

    def __post_init__(self) -> None:
        if not self.masses:
            raise ValueError("a law needs at least one mass")
        if self.exact:
            total = sum(self.masses, Fraction(0))
            if total != 1:
                raise ValueError(f"exact masses must sum to 1, got {total}")
            if any(m < 0 for m in self.masses):
                raise ValueError("masses must be non-negative")
        else:
            total = math.fsum(self.masses)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"float masses must sum to 1 within 1e-9, got {total}")

    @property
    def support_max(self) -> int:
        return len(self.masses) - 1

    def mean(self) -> Fraction | float:
        if self.exact:
            return sum((w * m for w, m in enumerate(self.masses)), Fraction(0))
        return math.fsum(w * m for w, m in enumerate(self.masses))

    def pmf_floats(self) -> list[float]:
        return [float(m) for m in self.masses]

    def tails(self):
        """P(W >= k) for k = 0..support_max+1 (last entry is zero)."""
        zero = Fraction(0) if self.exact else 0.0
        out = [zero] * (len(self.masses) + 1)
        acc = zero
        for w in range(len(self.masses) - 1, -1, -1):
            acc = acc + self.masses[w]
            out[w] = acc
        return out

    def tail(self, k: int):
        """Exact P(W >= k); values beyond the support are zero."""
        if k < 0:
            raise ValueError(f"k must be a non-negative integer, got {k}")
        if k > self.support_max:
            return Fraction(0) if self.exact else 0.0
        return sum(self.masses[k:], Fraction(0)) if self.exact else math.fsum(self.masses[k:])

    def log_tail(self, k: int) -> float:
        t = self.tail(k)
        if self.exact:
            return log_fraction(t)
        return math.log(t) if t > 0.0 else NEG_INF

    def to_payload(self, model: str = "", params: Mapping[str, Any] | None = None) -> dict:
        masses = (
            [f"{m.numerator}/{m.denominator}" for m in self.masses]
            if self.exact
            else [repr(m) for m in self.masses]
        )
        mean = self.mean()
        return {
            "model": model,
            "params": dict(params or {}),
            "support": [0, self.support_max],
            "exact": self.exact,
            "masses": masses,
            "mean": f"{mean.numerator}/{mean.denominator}" if self.exact else repr(mean),
            "mean_float": float(mean),
        }

    def to_json(self, model: str = "", params: Mapping[str, Any] | None = None) -> str:
        return json.dumps(self.to_payload(model, params), indent=2, sort_keys=True)


def law_tail(law: ExactLaw, k: int) -> float:
    """log P(W >= k) from the exact tail."""
    return law.log_tail(k)


# ---------------------------------------------------------------------------
# Poisson-binomial trials


def _convolve_indicators(probs: Sequence[Fraction]) -> ExactLaw:
    masses = [Fraction(1)]
    for p in probs:
        q = 1 - p
        nxt = [Fraction(0)] * (len(masses) + 1)
        for w, m in enumerate(masses):
            if m:
                nxt[w] += m * q
                nxt[w + 1] += m * p
        masses = nxt
    return ExactLaw(tuple(masses))


def pbt_law(model: PoissonBinomialModel) -> ExactLaw:
    """Sequential convolution: after i indicators the support is 0..i."""
    return _convolve_indicators(model.p)


def pbt_leave_one_out(model: PoissonBinomialModel, i: int) -> ExactLaw:
    """Law of the sum with indicator i removed (may be a point mass at zero)."""
    return _convolve_indicators(model.p[:i] + model.p[i + 1 :])


def binomial_law(n: int, p) -> ExactLaw:
    """Closed-form Binomial(n, p) pmf; the i.i.d. oracle, and the fast path
    for large i.i.d. instances where the convolution would be wasteful."""
    p = _as_fraction(p)
    a, b = p.numerator, p.denominator
    den = b**n
    pow_a = [1] * (n + 1)
    pow_c = [1] * (n + 1)
    for i in range(1, n + 1):
        pow_a[i] = pow_a[i - 1] * a
        pow_c[i] = pow_c[i - 1] * (b - a)
    masses = tuple(
        Fraction(math.comb(n, k) * pow_a[k] * pow_c[n - k], den) for k in range(n + 1)
    )
    return ExactLaw(masses)


# ---------------------------------------------------------------------------
# 2-runs on a cycle


def _weights(p: Fraction) -> tuple[int, int, int]:
    """Integer weight numerators (zero-bit, one-bit) and the per-bit denominator."""
    return p.denominator - p.numerator, p.numerator, p.denominator


def _two_runs_univariate_numerators(n: int, p: Fraction) -> list[int]:
    """Integer numerators of the 2-runs pmf over the common denominator b^n.

    Transfer-matrix sweep with state (first bit, current bit); the run count
    is carried as a polynomial coefficient vector.
    """
    w0, w1, _ = _weights(p)
    wt = (w0, w1)
    states: dict[tuple[int, int], list[int]] = {}
    for x1 in (0, 1):
        coeffs = [0] * (n + 1)
        coeffs[0] = wt[x1]
        states[(x1, x1)] = coeffs
    for _ in range(n - 1):
        nxt_states: dict[tuple[int, int], list[int]] = {}
        for (x1, cur), coeffs in states.items():
            for nxt in (0, 1):
                shift = cur & nxt
                weight = wt[nxt]
                key = (x1, nxt)
                target = nxt_states.setdefault(key, [0] * (n + 1))
                for w, c in enumerate(coeffs):
                    if c:
                        target[w + shift] += c * weight
        states = nxt_states
    out = [0] * (n + 1)
    for (x1, cur), coeffs in states.items():
        shift = cur & x1
        for w, c in enumerate(coeffs):
            if c:
                out[w + shift] += c
    return out


def _two_runs_univariate_floats(n: int, p: Fraction) -> list[float]:
    pf = float(p)
    wt = (1.0 - pf, pf)
    states: dict[tuple[int, int], list[float]] = {}
    for x1 in (0, 1):
        coeffs = [0.0] * (n + 1)
        coeffs[0] = wt[x1]
        states[(x1, x1)] = coeffs
    for _ in range(n - 1):
        nxt_states: dict[tuple[int, int], list[float]] = {}
        for (x1, cur), coeffs in states.items():
            for nxt in (0, 1):
                shift = cur & nxt
                weight = wt[nxt]
                target = nxt_states.setdefault((x1, nxt), [0.0] * (n + 1))
                for w, c in enumerate(coeffs):
                    if c:
                        target[w + shift] += c * weight
        states = nxt_states
    out = [0.0] * (n + 1)
    for (x1, cur), coeffs in states.items():
        shift = cur & x1
        for w, c in enumerate(coeffs):
            if c:
                out[w + shift] += c
    return out


def two_runs_law(model: TwoRunsModel, exact: bool | None = None) -> ExactLaw:
    """Univariate 2-runs law; exact up to the design limit, float beyond it."""
    if exact is None:
        exact = model.n <= TWO_RUNS_EXACT_LIMIT
    if exact:
        if model.n > TWO_RUNS_EXACT_LIMIT:
            raise ExactModeLimitError(
                f"exact 2-runs law is limited to n <= {TWO_RUNS_EXACT_LIMIT}, got {model.n}"
            )
        nums = _two_runs_univariate_numerators(model.n, model.p)
        den = model.p.denominator ** model.n
        return ExactLaw(tuple(Fraction(c, den) for c in nums))
    return ExactLaw(tuple(_two_runs_univariate_floats(model.n, model.p)), exact=False)


class JointLaw2Runs:
    """Exact joint law of (W, T): run pairs and adjacent run triples on the cycle.

    T carries the conditional clustering statistic: the neighborhood
    co-occurrence sum over the cycle reduces analytically to 2T, which is
    why no third marker is needed.
    """

    def __init__(self, n: int, p: Fraction, masses: Mapping[tuple[int, int], Fraction]):
        self.n = n
        self.p = p
        self.masses = dict(masses)
        total = sum(self.masses.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"joint masses must sum to 1, got {total}")
        if any(t > w for (w, t) in self.masses):
            raise ValueError("triple count cannot exceed the pair count")

    def marginal_w(self) -> ExactLaw:
        out = [Fraction(0)] * (self.n + 1)
        for (w, _), m in self.masses.items():
            out[w] += m
        return ExactLaw(tuple(out))

    def conditional_2t_mean(self, w: int) -> Fraction | None:
        """E(2T | W = w); None when the conditioning event has zero mass."""
        mass_w = Fraction(0)
        acc = Fraction(0)
        for (ww, t), m in self.masses.items():
            if ww == w:
                mass_w += m
                acc += 2 * t * m
        if mass_w == 0:
            return None
        return acc / mass_w

    def to_payload(self) -> dict:
        items = sorted(self.masses.items())
        return {
            "model": "two-runs-joint",
            "params": {"n": self.n, "p": f"{self.p.numerator}/{self.p.denominator}"},
            "masses": [
                {"w": w, "t": t, "mass": f"{m.numerator}/{m.denominator}"}
                for (w, t), m in items
            ],
        }


def two_runs_joint(model: TwoRunsModel) -> JointLaw2Runs:
    """Bivariate transfer-matrix sweep over the cycle.

    State is (first two bits, last two bits); each state carries integer
    numerators indexed by (w, t).  Closing the cycle adds the wraparound
    pair and the two wraparound triples.
    """
    n = model.n
    if n > TWO_RUNS_EXACT_LIMIT:
        raise ExactModeLimitError(
            f"exact joint law is limited to n <= {TWO_RUNS_EXACT_LIMIT}, got {n}"
        )
    w0, w1, b = _weights(model.p)
    wt = (w0, w1)
    states: dict[tuple[int, int, int, int], dict[tuple[int, int], int]] = {}
    for x1 in (0, 1):
        for x2 in (0, 1):
            states[(x1, x2, x1, x2)] = {(x1 & x2, 0): wt[x1] * wt[x2]}
    for _ in range(n - 2):
        nxt_states: dict[tuple[int, int, int, int], dict[tuple[int, int], int]] = {}
        for (x1, x2, prev, cur), poly in states.items():
            for nxt in (0, 1):
                dw = cur & nxt
                dt = prev & cur & nxt
                weight = wt[nxt]
                target = nxt_states.setdefault((x1, x2, cur, nxt), defaultdict(int))
                for (w, t), c in poly.items():
                    target[(w + dw, t + dt)] += c * weight
        states = nxt_states
    final: dict[tuple[int, int], int] = defaultdict(int)
    for (x1, x2, prev, cur), poly in states.items():
        dw = cur & x1
        dt = (prev & cur & x1) + (cur & x1 & x2)
        for (w, t), c in poly.items():
            final[(w + dw, t + dt)] += c
    den = b**n
    masses = {key: Fraction(c, den) for key, c in final.items() if c}
    return JointLaw2Runs(n, model.p, masses)


def two_runs_enumerate(model: TwoRunsModel) -> JointLaw2Runs:
    """Brute-force joint law over all 2^n bit cycles; the oracle for the sweep."""
    n = model.n
    if n > 20:
        raise ExactModeLimitError(f"enumeration oracle is limited to n <= 20, got {n}")
    w0, w1, b = _weights(model.p)
    mask = (1 << n) - 1
    weight_by_ones = [w1**o * w0 ** (n - o) for o in range(n + 1)]
    acc: dict[tuple[int, int], int] = defaultdict(int)
    for g in range(1 << n):
        rot1 = ((g >> 1) | (g << (n - 1))) & mask
        pairs = g & rot1
        rot2 = ((g >> 2) | (g << (n - 2))) & mask
        w = pairs.bit_count()
        t = (pairs & rot2).bit_count()
        acc[(w, t)] += weight_by_ones[g.bit_count()]
    den = b**n
    return JointLaw2Runs(n, model.p, {key: Fraction(c, den) for key, c in acc.items()})


@dataclass
class DeltaConditionTable:
    """Per-w conditional clustering ratios for the 2-runs model."""

    n: int
    p: Fraction
    theta: int
    entries: dict[int, Fraction | None]

    @property
    def delta_star(self) -> Fraction | None:
        defined = [v for v in self.entries.values() if v is not None]
        return max(defined) if defined else None

    def rows(self) -> list[dict]:
        out = []
        for w in sorted(self.entries):
            v = self.entries[w]
            out.append(
                {
                    "w": w,
                    "delta": v,
                    "delta_float": float(v) if v is not None else None,
                    "defined": v is not None,
                }
            )
        return out


def delta_condition_2runs(model: TwoRunsModel, theta: int) -> DeltaConditionTable:
    """delta(w) = E(2T | W=w) / w^2 for w = 1..theta.

    Zero-probability conditioning events are reported as undefined and are
    excluded from the fitted maximum: the clustering condition quantifies
    only over attainable w.
    """
    if theta < 1:
        raise ValueError(f"theta must be a positive integer, got {theta}")
    joint = two_runs_joint(model)
    entries: dict[int, Fraction | None] = {}
    for w in range(1, min(theta, model.n) + 1):
        cond = joint.conditional_2t_mean(w)
        entries[w] = None if cond is None else cond / (w * w)
    return DeltaConditionTable(model.n, model.p, theta, entries)


# ---------------------------------------------------------------------------
# Matching


def derangements(n_max: int) -> list[int]:
    """D_0..D_n_max via D_m = (m-1)(D_{m-1} + D_{m-2})."""
    d = [1, 0]
    for m in range(2, n_max + 1):
        d.append((m - 1) * (d[m - 1] + d[m - 2]))
    return d[: n_max + 1]


def matching_law(model: MatchingModel) -> ExactLaw:
    """Fixed-point counts: P(W=k) = C(n,k) * D_{n-k} / n!."""
    n = model.n
    d = derangements(n)
    nfact = math.factorial(n)
    masses = tuple(Fraction(math.comb(n, k) * d[n - k], nfact) for k in range(n + 1))
    return ExactLaw(masses)
