"""Local-dependence structure: neighborhoods, the uniform size constant, and
exact independence verification.

A dependency graph assigns each indicator index i a neighborhood B_i
containing i; the model claim is that X_i is independent of all indicators
outside B_i.  The checker verifies that claim by exhaustive enumeration in
exact arithmetic and refuses models too large to enumerate rather than
silently sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact_models import ExactModeLimitError, PoissonBinomialModel, TwoRunsModel

ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class DependencyGraph:
    """Neighborhoods B_i over the index set 0..n-1, with i in B_i."""

    neighborhoods: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = len(self.neighborhoods)
        if n == 0:
            raise ValueError("the index set must be non-empty")
        for i, b in enumerate(self.neighborhoods):
            if i not in b:
                raise ValueError(f"index {i} must belong to its own neighborhood")
            if any(j < 0 or j >= n for j in b):
                raise ValueError(f"neighborhood of {i} leaves the index set: {sorted(b)}")

    @property
    def n(self) -> int:
        return len(self.neighborhoods)

    def to_payload(self) -> dict:
        return {
            "n": self.n,
            "neighborhoods": [sorted(b) for b in self.neighborhoods],
        }


def neighborhood_stats(graph: DependencyGraph) -> tuple[int, int, int]:
    """(max out-size, max in-degree, their max): the single constant bounding both."""
    m_out = max(len(b) for b in graph.neighborhoods)
    in_deg = [0] * graph.n
    for b in graph.neighborhoods:
        for j in b:
            in_deg[j] += 1
    m_in = max(in_deg)
    return m_out, m_in, max(m_out, m_in)


def two_runs_graph(n: int) -> DependencyGraph:
    """Cyclic neighborhoods {i-1, i, i+1}; needs n >= 5 so wraparound stays disjoint."""
    if n < 5:
        raise ValueError(f"cyclic neighborhoods need n >= 5, got {n}")
    return DependencyGraph(
        tuple(frozenset({(i - 1) % n, i, (i + 1) % n}) for i in range(n))
    )


def singleton_graph(n: int) -> DependencyGraph:
    """B_i = {i}; correct for independent indicators, a negative control otherwise."""
    if n < 1:
        raise ValueError(f"need at least one index, got {n}")
    return DependencyGraph(tuple(frozenset({i}) for i in range(n)))


@dataclass
class IndependenceReport:
    passed: bool
    checked: int
    failures: list[dict]
    notes: str = ""

    def to_payload(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures[:10],
            "failure_count": len(self.failures),
            "notes": self.notes,
        }


def _two_runs_x_masks(n: int) -> tuple[list[int], list[int]]:
    """For each bit pattern of the cycle, the indicator pattern and weight exponent."""
    x_bits = []
    ones = []
    for g in range(1 << n):
        x = 0
        for i in range(n):
            if (g >> i) & 1 and (g >> ((i + 1) % n)) & 1:
                x |= 1 << i
        x_bits.append(x)
        ones.append(g.bit_count())
    return x_bits, ones


def independence_check(model, graph: DependencyGraph) -> IndependenceReport:
    """Verify P(X_i=1, X_S=x_S) = P(X_i=1) P(X_S=x_S) for S = complement of B_i.

    Exact in integer arithmetic.  For independent indicator models the claim
    holds by construction whenever B_i contains i, so the check is analytic;
    for the cyclic model it enumerates all 2^n bit patterns (refusing n
    beyond the enumeration limit).
    """
    if isinstance(model, PoissonBinomialModel):
        if graph.n != model.n:
            raise ValueError("graph and model index sets differ")
        return IndependenceReport(
            passed=True,
            checked=model.n,
            failures=[],
            notes="independent indicators: X_i is independent of every disjoint set",
        )
    if not isinstance(model, TwoRunsModel):
        raise ValueError(f"unsupported model type: {type(model).__name__}")
    n = model.n
    if graph.n != n:
        raise ValueError("graph and model index sets differ")
    if n > ENUMERATION_LIMIT:
        raise ExactModeLimitError(
            f"exact independence check enumerates 2^n patterns and is limited to "
            f"n <= {ENUMERATION_LIMIT}, got {n}"
        )
    a = model.p.numerator
    b = model.p.denominator
    x_bits, ones = _two_runs_x_masks(n)
    weights = [a**o * (b - a) ** (n - o) for o in ones]
    total = b**n
    failures: list[dict] = []
    for i in range(n):
        s_mask = 0
        for j in range(n):
            if j not in graph.neighborhoods[i]:
                s_mask |= 1 << j
        joint: dict[int, int] = {}
        marg: dict[int, int] = {}
        xi_num = 0
        for x, wgt in zip(x_bits, weights):
            key = x & s_mask
            marg[key] = marg.get(key, 0) + wgt
            if (x >> i) & 1:
                joint[key] = joint.get(key, 0) + wgt
                xi_num += wgt
        for key, m in marg.items():
            j = joint.get(key, 0)
            # P(X_i=1, x_S) == P(X_i=1) P(x_S), cross-multiplied over b^n
            if j * total != xi_num * m:
                failures.append(
                    {
                        "i": i,
                        "assignment": key,
                        "joint": Fraction(j, total),
                        "product": Fraction(xi_num, total) * Fraction(m, total),
                    }
                )
    return IndependenceReport(
        passed=not failures,
        checked=n,
        failures=failures,
        notes=f"enumerated 2^{n} bit patterns exactly",
    )


def coloring_classes(n: int) -> list[list[int]]:
    """Split the cycle into three residue classes of pairwise-disjoint indicators.

    Only defined when 3 divides n: otherwise the last class wraps onto the
    first and the within-class independence premise fails.
    """
    if n % 3 != 0:
        raise ValueError(f"residue-class coloring needs 3 | n, got {n}")
    return [[i for i in range(n) if i % 3 == r] for r in range(3)]


def verify_coloring_independence(model: TwoRunsModel) -> IndependenceReport:
    """Check that each coloring class of the cycle is a mutually independent family.

    Enumerates the joint law of (X_i : i in class) and compares it with the
    product of marginals, exactly.
    """
    n = model.n
    classes = coloring_classes(n)
    if n > ENUMERATION_LIMIT:
        raise ExactModeLimitError(
            f"exact coloring check is limited to n <= {ENUMERATION_LIMIT}, got {n}"
        )
    a = model.p.numerator
    b = model.p.denominator
    x_bits, ones = _two_runs_x_masks(n)
    weights = [a**o * (b - a) ** (n - o) for o in ones]
    total = b**n
    failures: list[dict] = []
    checked = 0
    for cls in classes:
        size = len(cls)
        joint: dict[int, int] = {}
        marg = [0] * size
        for x, wgt in zip(x_bits, weights):
            key = 0
            for pos, i in enumerate(cls):
                bit = (x >> i) & 1
                key |= bit << pos
                marg[pos] += bit * wgt
            joint[key] = joint.get(key, 0) + wgt
        for key in range(1 << size):
            j = joint.get(key, 0)
            prod_num = 1
            for pos in range(size):
                prod_num *= marg[pos] if (key >> pos) & 1 else total - marg[pos]
            # j / total == prod_num / total^size
            if j * total ** (size - 1) != prod_num:
                failures.append({"class": cls, "assignment": key})
            checked += 1
    return IndependenceReport(
        passed=not failures,
        checked=checked,
        failures=failures,
        notes=f"3 residue classes on a cycle of length {n}",
    )
