"""Numerically stable Poisson pmf/tail arithmetic and the Poisson-side tail inequalities.

Everything is pure: a :class:`PoissonLaw` is an immutable value and all
operations are functions of their arguments, safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .logspace import NEG_INF, log_add
from .report import BoundReport

# Series truncation: stop once the current term is below this multiple of the
# running sum and the term sequence is decreasing.
_REL_TRUNC = 1e-18


@dataclass(frozen=True)
class PoissonLaw:
    """Poisson distribution with mean ``lam``, evaluated in log space."""

    lam: float

    def __post_init__(self) -> None:
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"Poisson mean must be positive and finite, got {self.lam}")

    def log_pmf(self, k: int) -> float:
        """log P(Y = k) via log-gamma."""
        if k < 0:
            raise ValueError(f"k must be a non-negative integer, got {k}")
        return -self.lam + k * math.log(self.lam) - math.lgamma(k + 1)

    def log_tail(self, k: int) -> float:
        """log P(Y >= k).

        Below the mean the tail is the complement of a short lower sum (no
        cancellation risk: the lower sum stays well clear of 1).  Above the
        mean the pmf is summed upward from k with a max shift until the
        relative increment drops below 1e-18.
        """
        if k < 0:
            raise ValueError(f"k must be a non-negative integer, got {k}")
        if k == 0:
            return 0.0
        if k <= self.lam:
            lower = math.fsum(math.exp(self.log_pmf(j)) for j in range(k))
            return math.log1p(-lower)
        base = self.log_pmf(k)
        if base == NEG_INF:
            return NEG_INF
        total = 1.0
        term = 1.0
        j = k
        while True:
            term *= self.lam / (j + 1)
            total += term
            j += 1
            if term < _REL_TRUNC * total:
                break
        return base + math.log(total)

    def xi(self, k: int) -> float:
        """Standardized deviation (k - lam)/sqrt(lam); right tail only."""
        if k < self.lam:
            raise ValueError(
                f"right-tail only: require k >= lambda, got k={k}, lambda={self.lam}"
            )
        return (k - self.lam) / math.sqrt(self.lam)


def poisson_tables(lam: float, w_max: int) -> tuple[list[float], list[float], list[float]]:
    """Arrays of log pmf, log tail, and log cdf on 0..w_max.

    The tail array is accumulated downward from a directly computed top
    value and the cdf upward from zero, so each entry is a sum of
    same-sign terms.
    """
    law = PoissonLaw(lam)
    log_pmf = [law.log_pmf(w) for w in range(w_max + 1)]
    log_tail = [0.0] * (w_max + 1)
    log_tail[w_max] = law.log_tail(w_max)
    for w in range(w_max - 1, 0, -1):
        log_tail[w] = log_add(log_tail[w + 1], log_pmf[w])
    log_tail[0] = 0.0
    log_cdf = [0.0] * (w_max + 1)
    log_cdf[0] = log_pmf[0]
    for w in range(1, w_max + 1):
        log_cdf[w] = log_add(log_cdf[w - 1], log_pmf[w])
    return log_pmf, log_tail, log_cdf


def difference_bound_series(lam: float, w: int) -> float:
    """Sum of lam^j * w! * (j+1) / (j+w+1)! over j >= 0.

    This series is uniformly bounded over integer w >= lam > 0; its value
    scaled by 1/w is the forward difference of the Stein solution above
    the threshold.  Terms follow the recurrence
    t_0 = 1/(w+1), t_{j+1} = t_j * lam*(j+2) / ((j+1)*(j+w+2)).
    """
    if w < 1:
        raise ValueError(f"w must be a positive integer, got {w}")
    if w < lam:
        raise ValueError(f"series requires w >= lambda, got w={w}, lambda={lam}")
    term = 1.0 / (w + 1)
    total = term
    j = 0
    while True:
        nxt = term * lam * (j + 2) / ((j + 1) * (j + w + 2))
        total += nxt
        decreasing = nxt < term
        term = nxt
        j += 1
        if decreasing and term < _REL_TRUNC * total:
            return total


def verify_tail_inequalities(law: PoissonLaw, k_max: int) -> list[BoundReport]:
    """Check the three Poisson tail inequalities on 0..k_max.

    * ``poisson-tail-floor``: P(Y >= k) stays bounded away from 0 below the
      mean; the report's fitted value is the minimum observed tail.
    * ``poisson-tail-ratio``: P(Y >= k)/P(Y >= k-1) >= lam/(lam+k) for k >= 1.
    * ``poisson-tail-vs-pmf``: P(Y >= k) <= P(Y = k)*(k+1)/(k-lam+1)
      for k > lam-1.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be a positive integer, got {k_max}")
    lam = law.lam
    tails = [law.log_tail(k) for k in range(k_max + 2)]

    floor_rows = []
    for k in range(0, min(k_max, math.ceil(lam) - 1) + 1):
        if k >= lam:
            break
        tail = math.exp(tails[k])
        floor_rows.append({"k": k, "lhs": tail, "rhs_shape": 1.0, "ratio": tail})
    floor = BoundReport.fit(
        "poisson-tail-floor",
        floor_rows,
        budget=0.0,
        sense="lower",
        notes="fitted value is the minimal right tail over k < lambda",
    )

    ratio_rows = []
    for k in range(1, k_max + 1):
        bound = lam / (lam + k)
        observed = math.exp(tails[k] - tails[k - 1])
        ratio_rows.append({"k": k, "lhs": bound, "rhs_shape": observed})
    ratio = BoundReport.fit("poisson-tail-ratio", ratio_rows, budget=1.0, slack=1e-12)

    pmf_rows = []
    for k in range(0, k_max + 1):
        if k <= lam - 1:
            continue
        bound = math.exp(law.log_pmf(k)) * (k + 1) / (k - lam + 1)
        pmf_rows.append({"k": k, "lhs": math.exp(tails[k]), "rhs_shape": bound})
    pmf = BoundReport.fit("poisson-tail-vs-pmf", pmf_rows, budget=1.0, slack=1e-12)

    return [floor, ratio, pmf]
