"""Command-line surface: reproducible experiment runs with CSV/JSON output.

Exit codes form the CI contract: 0 on success, 1 when any verified
inequality fails its budget, 2 on usage errors (unknown model, k below the
mean, exact-mode size limits).  Identical configurations, including the
seed, produce byte-identical outputs; a one-line summary with the fitted
constants goes to stderr.  Commands that write a table can also render a
PNG figure next to it via ``--plot``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import bound_checker, dependence, exact_models, poisson_core, size_bias, stein_kernel
from .exact_models import (
    ExactModeLimitError,
    MatchingModel,
    PoissonBinomialModel,
    TwoRunsModel,
)
from .report import BoundReport, ReportSet, reports_to_json, write_reports_csv, write_table_csv

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _build_model(args) -> PoissonBinomialModel | TwoRunsModel | MatchingModel:
    model = args.model
    if model == "pbt":
        if args.p is None:
            raise ValueError("pbt needs --p (a probability or a comma list)")
        probs = args.p
        if len(probs) == 1 and args.n is not None:
            probs = probs * args.n
        return PoissonBinomialModel(probs)
    if model == "two-runs":
        if args.n is None or args.p is None:
            raise ValueError("two-runs needs --n and --p")
        if len(args.p) != 1:
            raise ValueError("two-runs takes a single --p")
        return TwoRunsModel(args.n, args.p[0])
    if model == "matching":
        if args.n is None:
            raise ValueError("matching needs --n")
        return MatchingModel(args.n)
    raise ValueError(f"unknown model: {model!r}")


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _plot_path(args) -> str | None:
    if not getattr(args, "plot", False):
        return None
    if not args.output:
        raise ValueError("--plot needs --output so the figure can sit next to the table")
    stem, _ = os.path.splitext(args.output)
    return stem + ".png"


def _table_text(rows: Sequence[dict], columns: Sequence[str], args, payload_extra: dict) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        write_table_csv(rows, columns, buf)
        return buf.getvalue()
    payload = dict(payload_extra)
    payload["rows"] = [
        {k: (f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v) for k, v in row.items()}
        for row in rows
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _reports_text(reports: list[BoundReport], args) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        write_reports_csv(reports, buf)
        return buf.getvalue()
    return reports_to_json(reports) + "\n"


# ---------------------------------------------------------------------------
# Commands


def _cmd_tail(args) -> int:
    law = poisson_core.PoissonLaw(args.lam)
    rows = []
    for k in range(args.k_max + 1):
        lp, lt = law.log_pmf(k), law.log_tail(k)
        rows.append(
            {"k": k, "log_pmf": lp, "log_tail": lt, "pmf": math.exp(lp), "tail": math.exp(lt)}
        )
    columns = ["k", "log_pmf", "log_tail", "pmf", "tail"]
    _emit(args, _table_text(rows, columns, args, {"command": "tail", "lambda": args.lam}))
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_xy_rows(rows, "k", ["pmf", "tail"], fig, f"Poisson({args.lam:g})", logy=True)
    print(f"tail lambda={args.lam:g} k_max={args.k_max}", file=sys.stderr)
    return EXIT_OK


def _cmd_stein(args) -> int:
    sol = stein_kernel.stein_solution(args.lam, args.k, args.w_max)
    rows = []
    for w in range(1, sol.w_max):
        rows.append(
            {
                "w": w,
                "f": sol.value(w),
                "forward_diff": sol.forward_diff(w),
                "residual": sol.residual(w),
            }
        )
    columns = ["w", "f", "forward_diff", "residual"]
    _emit(
        args,
        _table_text(
            rows, columns, args, {"command": "stein", "lambda": args.lam, "k": args.k}
        ),
    )
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_xy_rows(
            rows, "w", ["f", "forward_diff"], fig, f"Stein solution lam={args.lam:g} k={args.k}"
        )
    worst = max(abs(r["residual"]) for r in rows)
    print(f"stein lambda={args.lam:g} k={args.k}: max residual={worst:.3e}", file=sys.stderr)
    return EXIT_OK


def _cmd_g1(args) -> int:
    rows = []
    for w in range(args.w_max + 1):
        rows.append(
            {
                "w": w,
                "factorial": stein_kernel.g1(args.lam, w, "factorial"),
                "integral_series": stein_kernel.g1(args.lam, w, "integral_series"),
                "stein_diff": stein_kernel.g1(args.lam, w, "stein_diff"),
                "envelope": stein_kernel.g1_envelope(args.lam, w) if w >= 1 else 0.0,
            }
        )
    columns = ["w", "factorial", "integral_series", "stein_diff", "envelope"]
    _emit(args, _table_text(rows, columns, args, {"command": "g1", "lambda": args.lam}))
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_xy_rows(
            rows, "w", ["integral_series", "envelope"], fig, f"g1 lam={args.lam:g}", logy=True
        )
    print(f"g1 lambda={args.lam:g} w_max={args.w_max}", file=sys.stderr)
    return EXIT_OK


def _cmd_model(args) -> int:
    model = _build_model(args)
    if args.joint:
        if not isinstance(model, TwoRunsModel):
            raise ValueError("--joint applies to the two-runs model only")
        joint = exact_models.two_runs_joint(model)
        _emit(args, json.dumps(joint.to_payload(), indent=2, sort_keys=True) + "\n")
        print(f"model two-runs joint n={model.n}", file=sys.stderr)
        return EXIT_OK
    if isinstance(model, PoissonBinomialModel):
        law = exact_models.pbt_law(model)
        name, params = "pbt", {"n": model.n, "lambda": float(model.lam)}
    elif isinstance(model, TwoRunsModel):
        law = exact_models.two_runs_law(model, exact=None if not args.float else False)
        name, params = "two-runs", {"n": model.n, "p": str(model.p), "lambda": float(model.lam)}
    else:
        law = exact_models.matching_law(model)
        name, params = "matching", {"n": model.n}
    if args.format == "csv":
        rows = [
            {"w": w, "mass": m, "mass_float": float(m)} for w, m in enumerate(law.masses)
        ]
        _emit(args, _table_text(rows, ["w", "mass", "mass_float"], args, {}))
    else:
        _emit(args, json.dumps(law.to_payload(name, params), indent=2, sort_keys=True) + "\n")
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_law(law.pmf_floats(), float(law.mean()), fig, f"{name} law")
    print(f"model {name}: mean={float(law.mean()):.6g} support=0..{law.support_max}", file=sys.stderr)
    return EXIT_OK


def _cmd_coupling(args) -> int:
    model = _build_model(args)
    if args.samples is not None:
        if not isinstance(model, MatchingModel):
            raise ValueError("sampling is implemented for the matching model only")
        if args.seed is None:
            raise ValueError("sampling needs --seed for reproducibility")
        stats = size_bias.matching_coupling_sample(
            model, size_bias.RngStream(args.seed), args.samples, workers=args.workers
        )
        _emit(args, json.dumps(stats.to_payload(), indent=2, sort_keys=True) + "\n")
        print(
            f"coupling matching n={model.n} samples={args.samples}: "
            f"E|D|={stats.e_abs_diff:.6f} (se {stats.e_abs_diff_se:.2e}) "
            f"delta1={stats.delta1:.6f} delta2={stats.delta2:.6f}",
            file=sys.stderr,
        )
        return EXIT_OK
    delta_law = size_bias.coupling_delta_law(model)
    _emit(args, json.dumps(delta_law.to_payload(), indent=2, sort_keys=True) + "\n")
    d2 = delta_law.fitted_delta2()
    print(
        f"coupling {delta_law.model}: E|D|={float(delta_law.e_abs_delta()):.6f} "
        f"delta1={float(delta_law.fitted_delta1()):.6f} "
        f"delta2={float(d2) if d2 is not None else math.nan:.6f}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_delta_condition(args) -> int:
    model = TwoRunsModel(args.n, args.p[0])
    table = exact_models.delta_condition_2runs(model, args.theta)
    rows = table.rows()
    _emit(
        args,
        _table_text(
            rows,
            ["w", "delta", "delta_float", "defined"],
            args,
            {"command": "delta-condition", "n": args.n, "p": str(model.p), "theta": args.theta},
        ),
    )
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_xy_rows(rows, "w", ["delta_float"], fig, f"delta(w), n={args.n} p={model.p}")
    star = table.delta_star
    scaled = float(star * model.n * model.p) if star is not None else math.nan
    print(
        f"delta-condition n={args.n} p={model.p}: delta*={float(star) if star is not None else math.nan:.6g} "
        f"fitted_C=delta**np={scaled:.6g}",
        file=sys.stderr,
    )
    if args.budget is not None and star is not None and scaled > args.budget:
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def _cmd_ratio(args) -> int:
    model = _build_model(args)
    k_range = None
    if args.k_max is not None:
        lam = float(model.lam)
        k_min = args.k_min if args.k_min is not None else math.ceil(lam)
        k_range = range(k_min, args.k_max + 1)
    report = bound_checker.ratio_experiment(
        model, k_range, smallness=args.smallness, budget=args.budget
    )
    rows = [
        {
            "k": r["k"],
            "xi": r["xi"],
            "ratio_minus_1": r["ratio_minus_1"],
            "shape": r["rhs_shape"],
            "fitted_C": report.fitted_constant,
        }
        for r in report.rows
    ]
    _emit(
        args,
        _table_text(
            rows,
            ["k", "xi", "ratio_minus_1", "shape", "fitted_C"],
            args,
            {"command": "ratio", "inequality": report.inequality, "fitted_C": report.fitted_constant},
        ),
    )
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_ratio_rows(report.rows, report.fitted_constant, fig, report.inequality)
    print(
        f"{report.inequality}: fitted_C={report.fitted_constant:.6g} "
        f"over {len(report.rows) - report.excluded} points ({report.excluded} excluded)",
        file=sys.stderr,
    )
    if args.budget is not None and not report.passed:
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.model in ("pbt", "two-runs") and args.p == [None]:
        raise ValueError(f"{args.model} sweeps need --p (comma list of probabilities)")
    if args.model == "pbt":
        instances = [(p, n) for p in args.p for n in args.n_list]
        builder = lambda p, n: PoissonBinomialModel([p] * n)
    elif args.model == "two-runs":
        instances = [(p, n) for p in args.p for n in args.n_list]
        builder = lambda p, n: TwoRunsModel(n, p)
    elif args.model == "matching":
        instances = [(None, n) for n in args.n_list]
        builder = lambda p, n: MatchingModel(n)
    else:
        raise ValueError(f"unknown model: {args.model!r}")
    rows = []
    fits: dict[Any, list[float]] = {}
    for p, n in instances:
        model = builder(p, n)
        k_range = None
        if args.k_max is not None:
            k_range = range(math.ceil(float(model.lam)), args.k_max + 1)
        report = bound_checker.ratio_experiment(model, k_range, smallness=args.smallness)
        rows.append(
            {
                "p": str(p) if p is not None else "",
                "n": n,
                "lambda": float(model.lam),
                "fitted_C": report.fitted_constant,
                "points": len(report.rows) - report.excluded,
                "excluded": report.excluded,
            }
        )
        fits.setdefault(p, []).append(report.fitted_constant)
    _emit(
        args,
        _table_text(
            rows,
            ["p", "n", "lambda", "fitted_C", "points", "excluded"],
            args,
            {"command": "sweep", "model": args.model},
        ),
    )
    fig = _plot_path(args)
    if fig:
        from . import plots

        plots.plot_xy_rows(rows, "n", ["fitted_C"], fig, f"fitted constants: {args.model}")
    failed = False
    for p, values in sorted(fits.items(), key=lambda kv: str(kv[0])):
        positive = [v for v in values if v > 0]
        spread = max(positive) / min(positive) if positive else math.nan
        grew = max(values) > args.stability_budget * values[0] if values else False
        label = f"p={p}" if p is not None else "all"
        print(
            f"sweep {args.model} {label}: fits={['%.4g' % v for v in values]} "
            f"spread={spread:.3f} growth={'yes' if grew else 'no'}",
            file=sys.stderr,
        )
        if args.check_stability and grew:
            failed = True
    return EXIT_VERIFICATION_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# verify subcommand


def _verify_poisson_tails(args) -> list[BoundReport]:
    return poisson_core.verify_tail_inequalities(poisson_core.PoissonLaw(args.lam), args.k_max)


def _verify_series_bound(args) -> list[BoundReport]:
    import numpy as np

    lams = np.geomspace(args.lam_min, args.lam_max, args.lam_points)
    rows = []
    for lam in lams:
        for w in range(max(1, math.ceil(lam)), args.w_max + 1):
            rows.append(
                {"lambda": float(lam), "w": w,
                 "lhs": poisson_core.difference_bound_series(float(lam), w), "rhs_shape": 1.0}
            )
    return [
        BoundReport.fit(
            "difference-series-sup",
            rows,
            budget=args.budget,
            notes="fitted value is the grid supremum of the difference-bound series",
        )
    ]


def _verify_stein(args) -> list[BoundReport]:
    return stein_kernel.verify_solution(args.lam, args.k, args.w_max)


def _verify_g1(args) -> list[BoundReport]:
    reports = stein_kernel.verify_g1_bound(args.lam, args.w_max)
    rows = []
    lam_fr = Fraction(str(args.lam))
    for w in range(args.w_max + 1):
        exact = float(stein_kernel.g1_exact(lam_fr, w))
        for method in stein_kernel.G1_METHODS:
            val = stein_kernel.g1(args.lam, w, method)
            err = abs(val - exact) / exact if exact else abs(val)
            rows.append({"w": w, "method": method, "lhs": err, "rhs_shape": 1e-9})
    reports.append(
        BoundReport.fit(
            "g1-cross-method", rows, budget=1.0,
            notes="lhs is relative disagreement with the exact rational series",
        )
    )
    return reports


def _verify_size_bias(args) -> list[BoundReport]:
    model = _build_model(args)
    delta_law = size_bias.coupling_delta_law(model)
    outcome = size_bias.size_bias_identity_check(
        delta_law.marginal_w(), delta_law.ws_law(), args.degree
    )
    row = {
        "model": delta_law.model,
        "degree": args.degree,
        "lhs": 0.0 if outcome.passed else 1.0,
        "rhs_shape": 1.0,
        "failing_degree": outcome.failing_degree,
    }
    return [
        BoundReport.fit(
            "size-bias-identity", [row], budget=0.5,
            notes="exact monomial identity E[W w^q] = lam E[(W^s)^q]",
        )
    ]


def _verify_tv(args) -> list[BoundReport]:
    model = _build_model(args)
    return [size_bias.verify_tv_bound(size_bias.coupling_delta_law(model))]


def _verify_coupling(args) -> list[BoundReport]:
    model = MatchingModel(args.n)
    delta_law = size_bias.matching_coupling_enumerate(model)
    n = model.n
    law = delta_law.marginal_w()
    d = exact_models.derangements(n)
    rows = []
    for w in range(law.support_max + 1):
        if law.masses[w] == 0:
            continue
        up = delta_law.conditional(1, w)
        down = delta_law.conditional(-1, w)
        m = n - w
        expected_down = Fraction(m * (m - 1) * d[m - 2], n * d[m]) if m >= 2 else Fraction(0)
        ok = up == Fraction(w, n) and down == expected_down and down <= Fraction(2, n)
        rows.append(
            {
                "w": w,
                "p_up": float(up),
                "p_down": float(down),
                "lhs": 0.0 if ok else 1.0,
                "rhs_shape": 1.0,
            }
        )
    return [
        BoundReport.fit(
            "matching-coupling-conditionals",
            rows,
            budget=0.5,
            notes="P(D=1|W=w) = w/n exactly; P(D=-1|W=w) = m(m-1)D_{m-2}/(n D_m) <= 2/n",
        )
    ]


def _verify_bennett(args) -> list[BoundReport]:
    if not args.p:
        raise ValueError("bennett needs --p (a probability or a comma list)")
    model = PoissonBinomialModel(args.p * args.n if len(args.p) == 1 else args.p)
    return [bound_checker.bennett_hoeffding_check(model, args.x)]


def _verify_tail_expectation(args) -> list[BoundReport]:
    if not args.p:
        raise ValueError("tail-expectation needs --p")
    model = TwoRunsModel(args.n, args.p[0])
    return bound_checker.tail_expectation_check(model, args.x, verify_coloring=args.coloring)


def _verify_truncated(args) -> list[BoundReport]:
    model = _build_model(args)
    if isinstance(model, PoissonBinomialModel):
        law = exact_models.pbt_law(model)
    elif isinstance(model, TwoRunsModel):
        law = exact_models.two_runs_law(model)
    else:
        law = exact_models.matching_law(model)
    return bound_checker.truncated_expectation_check(law, model.lam, args.k)


def _verify_independence(args) -> list[BoundReport]:
    model = _build_model(args)
    if isinstance(model, TwoRunsModel):
        graph = (
            dependence.singleton_graph(model.n)
            if args.neighborhoods == "self"
            else dependence.two_runs_graph(model.n)
        )
    else:
        graph = dependence.singleton_graph(model.n)
    outcome = dependence.independence_check(model, graph)
    row = {
        "n": model.n,
        "neighborhoods": args.neighborhoods,
        "lhs": 0.0 if outcome.passed else 1.0,
        "rhs_shape": 1.0,
        "failures": len(outcome.failures),
    }
    return [
        BoundReport.fit("independence", [row], budget=0.5, notes=outcome.notes)
    ]


_VERIFY_DISPATCH = {
    "poisson-tails": _verify_poisson_tails,
    "series-bound": _verify_series_bound,
    "stein": _verify_stein,
    "g1": _verify_g1,
    "size-bias": _verify_size_bias,
    "tv": _verify_tv,
    "coupling": _verify_coupling,
    "bennett": _verify_bennett,
    "tail-expectation": _verify_tail_expectation,
    "truncated-expectations": _verify_truncated,
    "independence": _verify_independence,
}


def _cmd_verify(args) -> int:
    reports = _VERIFY_DISPATCH[args.check](args)
    _emit(args, _reports_text(reports, args))
    bundle = ReportSet(reports)
    print(f"verify {args.check}: {bundle.summary()}", file=sys.stderr)
    return EXIT_OK if bundle.passed else EXIT_VERIFICATION_FAILED


# ---------------------------------------------------------------------------
# Parser


def _add_io_options(parser: argparse.ArgumentParser, default_format: str = "csv") -> None:
    parser.add_argument("--format", choices=("csv", "json"), default=default_format)
    parser.add_argument("--output", help="write the table here instead of stdout")
    parser.add_argument(
        "--plot", action="store_true", help="render a PNG figure next to --output"
    )


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, choices=("pbt", "two-runs", "matching"))
    parser.add_argument("--p", type=_fraction_list, help="probability or comma list")
    parser.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinpoisson",
        description="Poisson approximation experiments: Stein solutions, exact laws, "
        "couplings, and tail-ratio bound verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail", help="Poisson pmf/tail table")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--k-max", type=int, required=True)
    _add_io_options(p)
    p.set_defaults(fn=_cmd_tail)

    p = sub.add_parser("stein", help="Stein solution table for one (lambda, k)")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--w-max", type=int)
    _add_io_options(p)
    p.set_defaults(fn=_cmd_stein)

    p = sub.add_parser("g1", help="increment function by all three methods")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--w-max", type=int, required=True)
    _add_io_options(p)
    p.set_defaults(fn=_cmd_g1)

    p = sub.add_parser("model", help="exact law of a model as JSON/CSV")
    _add_model_options(p)
    p.add_argument("--joint", action="store_true", help="two-runs joint (W, T) law")
    p.add_argument("--float", action="store_true", help="force the float-backed law")
    _add_io_options(p, default_format="json")
    p.set_defaults(fn=_cmd_model)

    p = sub.add_parser("coupling", help="size-bias coupling law or Monte Carlo stats")
    _add_model_options(p)
    p.add_argument("--exact", action="store_true", help="exact joint law (default)")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, help="64-bit seed (required for sampling)")
    p.add_argument("--workers", type=int, help="worker substreams for sampling")
    _add_io_options(p, default_format="json")
    p.set_defaults(fn=_cmd_coupling)

    p = sub.add_parser("delta-condition", help="conditional clustering table for 2-runs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_fraction_list, required=True)
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--budget", type=float, help="fail (exit 1) if delta* * np exceeds this")
    _add_io_options(p)
    p.set_defaults(fn=_cmd_delta_condition)

    p = sub.add_parser("ratio", help="tail-ratio experiment against the model's bound shape")
    _add_model_options(p)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--smallness", type=float, help="restrict the fit to shape <= this")
    p.add_argument("--budget", type=float, help="fail (exit 1) if fitted C exceeds this")
    _add_io_options(p)
    p.set_defaults(fn=_cmd_ratio)

    p = sub.add_parser("sweep", help="ratio experiments over a parameter grid")
    p.add_argument("--model", required=True, choices=("pbt", "two-runs", "matching"))
    p.add_argument("--p", type=_fraction_list, default=[None])
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--k-max", type=int)
    p.add_argument("--smallness", type=float)
    p.add_argument("--check-stability", action="store_true")
    p.add_argument(
        "--stability-budget",
        type=float,
        default=2.0,
        help="with --check-stability, fail if any fit exceeds this multiple of the first",
    )
    _add_io_options(p)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run a named verification, exit 1 on any violation")
    p.add_argument("check", choices=sorted(_VERIFY_DISPATCH))
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--k-max", type=int, default=30)
    p.add_argument("--w-max", type=int, default=None)
    p.add_argument("--lam-min", type=float, default=0.1)
    p.add_argument("--lam-max", type=float, default=50.0)
    p.add_argument("--lam-points", type=int, default=11)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--model", choices=("pbt", "two-runs", "matching"), default="matching")
    p.add_argument("--p", type=_fraction_list)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--x", type=_float_list, default=[5.0, 10.0, 15.0])
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--coloring", action="store_true")
    p.add_argument("--neighborhoods", choices=("full", "self"), default="full")
    _add_io_options(p, default_format="json")
    p.set_defaults(fn=_cmd_verify)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.check == "g1" and args.w_max is None:
        args.w_max = 20
    try:
        return args.fn(args)
    except ExactModeLimitError as exc:
        print(f"error: exact-mode size limit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
