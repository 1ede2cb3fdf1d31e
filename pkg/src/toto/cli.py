"""Command-line front end: ``solve``, ``table``, ``simulate`` and ``sweep``."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import os
import sys

import numpy as np

from . import reference
from .model import InvalidProblemError, PhaseState, PhysicalSpec, ProblemSpec, scale_problem
from .oracle import OracleConfig, confirm_minimum
from .solver import SolverConfig, SolverError, enumerate_candidates, optimal_protocol
from .trajectory import simulate_protocol

log = logging.getLogger("toto")

EXIT_INVALID = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


def canonical(obj):
    """Round floats to 10 significant digits; non-finite floats become null."""
    if isinstance(obj, float):
        return float(format(obj, ".10g")) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(canonical(report), indent=2)


def fmt(v: float) -> str:
    return format(float(v), ".10g")


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem (scaled or physical)")
    g.add_argument("--gamma", type=float, help="sqrt(omega0/omegaf); sqrt(3) is 1.7320508")
    g.add_argument("--u1", type=float, help="lower control bound (omega1/omega0)^2")
    g.add_argument("--u2", type=float, help="upper control bound (omega2/omega0)^2")
    g.add_argument("--omega0", type=float)
    g.add_argument("--omegaf", type=float)
    g.add_argument("--omega1", type=float)
    g.add_argument("--omega2", type=float)
    p.add_argument("--nmax", type=int, default=SolverConfig.n_max, help="largest turn count to enumerate")


def _problem(args) -> tuple[ProblemSpec, PhysicalSpec | None]:
    scaled = (args.gamma, args.u1, args.u2)
    physical = (args.omega0, args.omegaf, args.omega1, args.omega2)
    if all(v is not None for v in scaled) and all(v is None for v in physical):
        return ProblemSpec(*scaled), None
    if all(v is not None for v in physical) and all(v is None for v in scaled):
        phys = PhysicalSpec(*physical)
        return scale_problem(phys), phys
    raise InvalidProblemError("give either --gamma/--u1/--u2 or --omega0/--omegaf/--omega1/--omega2")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(n_max=args.nmax)


def _warn_if_at_nmax(best, cfg: SolverConfig) -> None:
    if best.n == cfg.n_max:
        log.warning("minimum found at n = n_max = %d; rerun with a larger --nmax", cfg.n_max)


def candidate_record(sol, scale: float = 1.0, optimal: bool = False) -> dict:
    return {
        "label": sol.label,
        "family": sol.family.value,
        "n": sol.n,
        "branch": sol.branch.symbol,
        "switch_count": sol.switch_count,
        "word": sol.word,
        "s": sol.s,
        "t_initial": sol.t_initial / scale,
        "t_x": sol.t_x / scale,
        "t_y": sol.t_y / scale,
        "t_final": sol.t_final / scale,
        "total_time": sol.total_time / scale,
        "optimal": optimal,
    }


def solve_report(spec: ProblemSpec, cfg: SolverConfig, *, scale: float = 1.0, oracle: bool = False) -> dict:
    candidates = enumerate_candidates(spec, cfg)
    best, _ = optimal_protocol(spec, cfg, candidates)
    _warn_if_at_nmax(best, cfg)
    v = best.validation
    report = {
        "spec": {"gamma": spec.gamma, "u1": spec.u1, "u2": spec.u2},
        "time_unit": "scaled" if scale == 1.0 else "seconds",
        "candidates": [candidate_record(c, scale, c is best) for c in candidates],
        "optimal": best.label,
        "validation": {
            "endpoint_error": v.endpoint_error,
            "max_integral_drift": v.max_integral_drift,
            "max_casimir_drift": v.max_casimir_drift,
            "max_ratio_residual": v.max_ratio_residual,
            "passed": v.passed,
        },
    }
    if oracle:
        conf = confirm_minimum(spec, best, OracleConfig())
        report["oracle"] = {
            "best_time": conf.best_oracle_time / scale,
            "max_duration_deviation": conf.max_duration_deviation / scale,
            "falsified": conf.falsified,
            "passed": conf.passed,
        }
    return report


def cmd_solve(args) -> int:
    spec, phys = _problem(args)
    if args.seconds and phys is None:
        raise InvalidProblemError("--seconds needs the physical frequencies")
    scale = phys.omega0 if args.seconds else 1.0
    report = solve_report(spec, _solver_config(args), scale=scale, oracle=args.oracle)
    if args.json:
        print(dumps(report))
    else:
        unit = "s" if args.seconds else "scaled"
        print(f"gamma={fmt(spec.gamma)}  u1={fmt(spec.u1)}  u2={fmt(spec.u2)}  (times: {unit})")
        print(f"{'':2}{'label':<6}{'word':<20}{'s':>14}{'total':>10}")
        for c in report["candidates"]:
            mark = "*" if c["optimal"] else " "
            print(f"{mark:2}{c['label']:<6}{c['word']:<20}{c['s']:>14.8f}{c['total_time']:>10.4f}")
        print(f"optimal: {report['optimal']} {next(c for c in report['candidates'] if c['optimal'])['total_time']:.4f}")
        if "oracle" in report:
            o = report["oracle"]
            print(f"oracle: best {o['best_time']:.4f}, passed={o['passed']}")
    if not report["validation"]["passed"] or not report.get("oracle", {}).get("passed", True):
        return EXIT_VALIDATION
    return 0


def table_values(cfg: SolverConfig = SolverConfig()) -> tuple[dict, list[str]]:
    """Computed extremal times keyed by row label, one entry per benchmark case."""
    values = {}
    optimal = []
    for j, (gamma, u2) in enumerate(reference.CASES):
        spec = ProblemSpec(gamma, reference.U1, u2)
        candidates = enumerate_candidates(spec, cfg)
        best, _ = optimal_protocol(spec, cfg, candidates)
        optimal.append(best.label)
        for sol in candidates:
            row = values.setdefault(sol.label, [None] * len(reference.CASES))
            if row[j] is not None:
                log.warning("%s has several extremals for case %d; keeping the fastest", sol.label, j)
                continue
            row[j] = sol.total_time
    return values, optimal


def compare_table(values: dict) -> list[tuple[str, int, float | None, float | None, float]]:
    """Per-cell ``(label, case, computed, published, deviation)``; missing-vs-present is ``inf``."""
    out = []
    labels = list(reference.ROWS) + sorted(set(values) - set(reference.ROWS))
    for label in labels:
        ours = values.get(label, [None] * len(reference.CASES))
        published = reference.TABLE.get(label, (None,) * len(reference.CASES))
        for j, (a, b) in enumerate(zip(ours, published)):
            if a is None and b is None:
                dev = 0.0
            elif a is None or b is None:
                dev = math.inf
            else:
                dev = abs(a - b)
            out.append((label, j, a, b, dev))
    return out


def cmd_table(args) -> int:
    values, optimal = table_values(SolverConfig(n_max=args.nmax))
    header = ["", *(f"g={fmt(round(g, 4))},u2={fmt(u2)}" for g, u2 in reference.CASES)]
    print("".join(f"{h:<20}" for h in header))
    labels = list(reference.ROWS) + sorted(set(values) - set(reference.ROWS))
    for label in labels:
        cells = []
        for j, v in enumerate(values.get(label, [None] * 4)):
            cell = "-" if v is None else f"{v:.4f}" + ("*" if optimal[j] == label else "")
            cells.append(cell)
        print(f"{label:<20}" + "".join(f"{c:<20}" for c in cells))
    if args.tolerance is None:
        return 0
    cells = compare_table(values)
    worst = max(cells, key=lambda c: c[4])
    bad = [c for c in cells if not c[4] <= args.tolerance]
    print(f"max deviation from published values: {worst[4]:.3g} ({worst[0]}, case {worst[1] + 1})")
    for label, j, a, b, dev in bad:
        ours = "-" if a is None else f"{a:.4f}"
        theirs = "-" if b is None else f"{b:.4f}"
        print(f"  exceeds {args.tolerance:g}: {label} case {j + 1}: computed {ours}, published {theirs}")
    return 1 if bad else 0


def cmd_simulate(args) -> int:
    spec, phys = _problem(args)
    cfg = _solver_config(args)
    best, protocol = optimal_protocol(spec, cfg)
    _warn_if_at_nmax(best, cfg)
    traj = simulate_protocol(PhaseState(1.0, 0.0), protocol, args.samples_per_segment)
    try:
        if args.out in (None, "-"):
            traj.to_csv(sys.stdout)
        else:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                traj.to_csv(fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def parse_range(text: str) -> np.ndarray:
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:steps, got {text!r}") from None
    if steps < 1:
        raise argparse.ArgumentTypeError("steps must be at least 1")
    return np.linspace(a, b, steps)


SWEEP_HEADER = "gamma,u2,optimal_family,n,branch,switch_count,total_time,status"


def sweep_row(point) -> str:
    gamma, u2, u1, n_max = point
    try:
        spec = ProblemSpec(gamma, u1, u2)
    except InvalidProblemError:
        return f"{fmt(gamma)},{fmt(u2)},,,,,,invalid"
    try:
        best, _ = optimal_protocol(spec, SolverConfig(n_max=n_max))
    except SolverError:
        return f"{fmt(gamma)},{fmt(u2)},,,,,,error"
    return (
        f"{fmt(gamma)},{fmt(u2)},{best.family.value},{best.n},{best.branch.symbol},"
        f"{best.switch_count},{fmt(best.total_time)},ok"
    )


def _workers() -> int:
    raw = os.environ.get("TOTO_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def cmd_sweep(args) -> int:
    points = [(float(g), float(u2), args.u1, args.nmax) for g in args.gamma_range for u2 in args.u2_range]
    workers = min(_workers(), len(points))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(sweep_row, points))
    else:
        rows = [sweep_row(p) for p in points]
    text = SWEEP_HEADER + "\n" + "".join(r + "\n" for r in rows)
    try:
        if args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toto", description="Minimum-time bang-bang cooling of a parametric oscillator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="enumerate extremals and report the fastest")
    _add_problem_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle", action="store_true", help="confirm the minimum by brute-force search")
    p.add_argument("--seconds", action="store_true", help="report times in seconds (physical input only)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce the benchmark table")
    p.add_argument("--nmax", type=int, default=SolverConfig.n_max)
    p.add_argument("--tolerance", type=float, help="compare with the published values")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="write the optimal trajectory as CSV")
    _add_problem_args(p)
    p.add_argument("--samples-per-segment", type=int, default=200)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="optimal structure over a (gamma, u2) grid")
    p.add_argument("--gamma-range", type=parse_range, required=True, metavar="A:B:STEPS")
    p.add_argument("--u2-range", type=parse_range, required=True, metavar="A:B:STEPS")
    p.add_argument("--u1", type=float, default=reference.U1)
    p.add_argument("--nmax", type=int, default=SolverConfig.n_max)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InvalidProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
