"""Log-space arithmetic for probabilities spanning hundreds of orders of magnitude.

All probabilities in this package are carried as natural-log values
(``-inf`` allowed for exact zeros) and only materialized to linear floats
at reporting boundaries.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

NEG_INF = float("-inf")
_LOG_HALF = -math.log(2.0)


def log1mexp(x: float) -> float:
    """log(1 - e^x) for x <= 0, accurate near both endpoints."""
    if x > 0.0:
        raise ValueError(f"log1mexp requires x <= 0, got {x}")
    if x == 0.0:
        return NEG_INF
    if x > _LOG_HALF:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def log_add(a: float, b: float) -> float:
    """log(e^a + e^b)."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_sub(a: float, b: float) -> float:
    """log(e^a - e^b); requires a >= b, returns -inf at equality."""
    if b == NEG_INF:
        return a
    if b > a:
        raise ValueError(f"log_sub requires a >= b, got a={a}, b={b}")
    if a == b:
        return NEG_INF
    return a + log1mexp(b - a)


def log_sum(values: Iterable[float]) -> float:
    """logsumexp with a max shift; empty input yields -inf."""
    vals = [v for v in values if v != NEG_INF]
    if not vals:
        return NEG_INF
    m = max(vals)
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def log_fraction(value: Fraction) -> float:
    """Natural log of a non-negative rational whose terms may exceed float range."""
    if value < 0:
        raise ValueError(f"log_fraction requires a non-negative value, got {value}")
    if value == 0:
        return NEG_INF
    return math.log(value.numerator) - math.log(value.denominator)
