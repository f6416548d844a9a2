"""Figure rendering for report tables.

Figures are a side output of the CLI report path: every command that writes
a delimited table can also render a PNG next to it.  The Agg backend keeps
rendering deterministic and headless; PNG metadata is pinned so repeated
runs produce identical bytes.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

plt.rcParams["figure.figsize"] = (6.0, 3.6)
plt.rcParams["figure.dpi"] = 150
plt.rcParams["savefig.bbox"] = "tight"

_PNG_METADATA = {"Software": "steinpoisson"}


def _save(fig, path: str) -> None:
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)


def _finite(xs, ys):
    pairs = [
        (x, y)
        for x, y in zip(xs, ys)
        if y is not None and isinstance(y, (int, float)) and math.isfinite(y)
    ]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def plot_ratio_rows(rows: Sequence[Mapping], fitted: float, path: str, title: str) -> None:
    """Tail-ratio deviation per k against the fitted bound envelope."""
    ks = [r["k"] for r in rows]
    fig, ax = plt.subplots()
    x1, y1 = _finite(ks, [r["lhs"] for r in rows])
    positive = [(x, y) for x, y in zip(x1, y1) if y > 0.0]
    if positive:
        ax.semilogy([p[0] for p in positive], [p[1] for p in positive], "o-", label="|tail ratio - 1|")
    x2, y2 = _finite(ks, [r["rhs_shape"] for r in rows])
    if fitted > 0.0:
        ax.semilogy(x2, [fitted * v for v in y2], "s--", label=f"fitted C x shape (C={fitted:.3g})")
    ax.set_xlabel("k")
    ax.set_ylabel("deviation")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_xy_rows(
    rows: Sequence[Mapping],
    x_key: str,
    y_keys: Sequence[str],
    path: str,
    title: str,
    logy: bool = False,
) -> None:
    """Generic per-row line plot for tables keyed by one grid column."""
    fig, ax = plt.subplots()
    for key in y_keys:
        xs, ys = _finite([r[x_key] for r in rows], [r.get(key) for r in rows])
        if not xs:
            continue
        if logy:
            pos = [(x, y) for x, y in zip(xs, ys) if y > 0.0]
            if not pos:
                continue
            ax.semilogy([p[0] for p in pos], [p[1] for p in pos], marker="o", label=key)
        else:
            ax.plot(xs, ys, marker="o", label=key)
    ax.set_xlabel(x_key)
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_law(masses: Sequence[float], poisson_lam: float, path: str, title: str) -> None:
    """Model pmf bars with the matched-mean Poisson overlay."""
    from .poisson_core import PoissonLaw

    poi = PoissonLaw(poisson_lam)
    ws = list(range(len(masses)))
    fig, ax = plt.subplots()
    ax.bar(ws, masses, width=0.8, alpha=0.6, label="model pmf")
    ax.plot(ws, [math.exp(poi.log_pmf(w)) for w in ws], "k.-", label=f"Poisson({poisson_lam:g})")
    ax.set_xlabel("w")
    ax.set_ylabel("mass")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)
