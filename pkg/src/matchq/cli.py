"""Command-line front end.

Subcommands:
* ``analyze``  - stability report plus the full metrics table
* ``sweep``    - CSV of per-class metrics over a load grid (figure data)
* ``simulate`` - estimates with confidence half-widths next to exact values
* ``optimize`` - degree-proportional or min-max-load rate design

Exit codes: 0 success, 2 parse error, 3 instability when stability was
required (or a graph that can never be stabilized), 4 enumeration cap
exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__, analytics, heuristics, simulator, sweeps
from .errors import (
    GraphStructureError,
    InputFormatError,
    ResourceCapError,
    StabilityError,
)
from .fileio import fmt, load_graph, load_rates, write_simulation_csv, write_sweep_csv
from .graphs import classes_of, enumerate_independent_sets, mask_of

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSTABLE = 3
EXIT_RESOURCE = 4


def _labels(mask: int) -> str:
    return "{" + ",".join(str(i + 1) for i in classes_of(mask)) + "}"


def _print_stability(report: analytics.StabilityReport) -> None:
    if report.stable:
        print(f"stable: yes (max load {fmt(report.max_load)} at {_labels(report.argmax_set)})")
        return
    reason = f" ({report.reason})" if report.reason else ""
    print(f"stable: no{reason}")
    for mask, rho in report.violations:
        print(f"  violated: load({_labels(mask)}) = {fmt(rho)} >= 1")


def _print_metrics(table: analytics.MetricsTable) -> None:
    rates = table.rates
    print(f"pi(empty) = {fmt(table.pi_empty)}")
    print("class  rate            waiting_prob    mean_unmatched  mean_match_time")
    for i in range(table.graph.n):
        eti = "undefined" if math.isnan(table.ETi[i]) else fmt(table.ETi[i])
        print(
            f"{i + 1:<6d} {fmt(rates.alpha[i]):<15} {fmt(table.omega[i]):<15} "
            f"{fmt(table.Li[i]):<15} {eti}"
        )
    avg_wait = math.fsum(a * w for a, w in zip(rates.alpha, table.omega, strict=True))
    print(f"overall: L = {fmt(table.L)}, mean matching time = {fmt(table.ET)}")
    print(f"check: sum_i alpha_i * omega_i = {fmt(avg_wait)} (must be 0.5)")


def cmd_analyze(args) -> int:
    g = load_graph(args.graph)
    rates = load_rates(args.rates)
    report = analytics.check_stability(g, rates)
    _print_stability(report)
    if not report.stable:
        return EXIT_UNSTABLE if args.require_stable else EXIT_OK
    table = analytics.compute_metrics(g, rates)
    _print_metrics(table)
    return EXIT_OK


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise InputFormatError(f"bad grid {text!r}; expected A:B:STEP") from exc
    if step <= 0 or hi < lo:
        raise InputFormatError(f"bad grid {text!r}")
    count = int(round((hi - lo) / step)) + 1
    grid = tuple(round(lo + k * step, 12) for k in range(count))
    return tuple(v for v in grid if 0.0 < v < 1.0)


def _parse_class_set(text: str) -> int:
    try:
        labels = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputFormatError(f"bad class set {text!r}") from exc
    if any(v < 1 for v in labels):
        raise InputFormatError("class labels are 1-based")
    return mask_of(v - 1 for v in labels)


def cmd_sweep(args) -> int:
    g = load_graph(args.graph)
    if (args.rates is None) == (args.rule is None):
        raise InputFormatError("provide exactly one of --rates or --rule")
    if args.rates is not None:
        spec = sweeps.SweepSpec(graph=g, rule="explicit", rates=load_rates(args.rates))
    else:
        grid = _parse_grid(args.rho_grid) if args.rho_grid else sweeps.default_grid()
        saturated = _parse_class_set(args.saturated) if args.saturated else None
        spec = sweeps.SweepSpec(graph=g, rule=args.rule, rho_grid=grid, saturated=saturated)
    rows = sweeps.run_sweep(spec)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        write_sweep_csv(fh, g.n, rows)
    unstable = sum(1 for r in rows if not r.stable)
    print(f"wrote {len(rows)} rows to {args.out} ({unstable} unstable)")
    if unstable and args.require_stable:
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    rates = load_rates(args.rates)
    est = simulator.simulate_replicated(
        g,
        rates,
        steps=args.steps,
        seed=args.seed,
        warmup=args.warmup,
        replications=args.replications,
    )
    print(
        f"backend={est.backend} steps={est.steps} warmup={est.warmup} "
        f"replications={est.replications} seed={est.seed}"
    )
    if est.stability_warning:
        print(f"warning: {est.stability_warning}")
    exact = None
    if est.stability_warning is None:
        exact = analytics.compute_metrics(g, rates, est.index)
        print(f"pi(empty): estimate {fmt(est.pi_hat[0])} +- {fmt(est.pi_half_width[0])}"
              f", exact {fmt(exact.pi_empty)}")
    else:
        print(f"pi(empty): estimate {fmt(est.pi_hat[0])} +- {fmt(est.pi_half_width[0])}")
    print("class  waiting_prob (+-hw)           mean_unmatched (+-hw)")
    for i in range(g.n):
        wcol = f"{fmt(est.omega_hat[i])} (+-{fmt(est.omega_half_width[i])})"
        lcol = f"{fmt(est.Li_hat[i])} (+-{fmt(est.Li_half_width[i])})"
        suffix = ""
        if exact is not None:
            suffix = f"  exact: {fmt(exact.omega[i])}, {fmt(exact.Li[i])}"
        print(f"{i + 1:<6d} {wcol:<30} {lcol:<30}{suffix}")
    line = f"L: estimate {fmt(est.L_hat)} +- {fmt(est.L_half_width)}"
    if exact is not None:
        line += f", exact {fmt(exact.L)}"
    print(line)
    print(
        f"avg waiting fraction: {fmt(est.avg_wait_hat)} +- {fmt(est.avg_wait_half_width)}"
        " (theory: 0.5)"
    )
    if args.out:
        stable = est.stability_warning is None
        load_value = None
        try:
            load_value = analytics.check_stability(g, rates, est.index).max_load
        except GraphStructureError:
            pass
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_simulation_csv(fh, est, load_value, stable)
        print(f"wrote estimates to {args.out}")
    if est.stability_warning and args.require_stable:
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_optimize(args) -> int:
    g = load_graph(args.graph)
    if args.mode == "degree":
        rates = heuristics.degree_proportional_rates(g)
        index = enumerate_independent_sets(g)
        achieved = max(analytics.load(g, rates, mask) for mask in index.sets[1:])
        print("mode: degree-proportional")
    else:
        if args.max_cardinality is not None:
            result = heuristics.restricted_minimize_max_load(
                g,
                args.max_cardinality,
                tol=args.tol,
                max_iterations=args.max_iterations,
            )
        else:
            result = heuristics.minimize_max_load(
                g, tol=args.tol, max_iterations=args.max_iterations
            )
        rates = result.rates
        achieved = result.achieved_max_load
        print(
            f"mode: min-max load (iterations={result.iterations},"
            f" converged={result.converged})"
        )
        if result.warning:
            print(f"warning: {result.warning}")
    print("rates: " + " ".join(fmt(a) for a in rates.alpha))
    print(f"achieved max load: {fmt(achieved)}")
    try:
        table = analytics.compute_metrics(g, rates)
    except StabilityError as exc:
        print(f"returned rates are not stable: {exc}")
        return EXIT_UNSTABLE
    _print_metrics(table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchq",
        description="Exact analysis of first-come-first-matched matching models",
    )
    parser.add_argument("--version", action="version", version=f"matchq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="stability report and metrics table")
    p.add_argument("--graph", required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--require-stable", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="CSV of metrics over a load grid")
    p.add_argument("--graph", required=True)
    p.add_argument("--rates", help="explicit rates file (single row)")
    p.add_argument("--rule", choices=[r for r in sweeps.RULES if r != "explicit"])
    p.add_argument("--rho-grid", help="A:B:STEP, default 0.01:0.99:0.01")
    p.add_argument("--saturated", help="1-based classes to saturate, e.g. 1,3,5,7")
    p.add_argument("--out", required=True)
    p.add_argument("--require-stable", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="simulation estimates with half-widths")
    p.add_argument("--graph", required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", type=int, default=None)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--out", help="also write estimates as one CSV row with half-widths")
    p.add_argument("--require-stable", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="stabilizing arrival-rate design")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=["degree", "minmax"], required=True)
    p.add_argument("--max-cardinality", type=int, default=None)
    p.add_argument("--tol", type=float, default=heuristics.BISECTION_TOL)
    p.add_argument(
        "--max-iterations", type=int, default=heuristics.MAX_BISECTION_ITERATIONS
    )
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (StabilityError, GraphStructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
