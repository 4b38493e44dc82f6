"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage or input error,
3 optimizer did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import measures
from .measures import (
    THRESHOLDS,
    average_fidelity,
    classify_channel,
    d_bounds,
    f_bounds,
    fidelity_deviation,
    half_circle_bound,
    region_triangle,
)
from .montecarlo import MIN_SAMPLES, SamplerConfig, mc_fidelity_moments
from .optimizer import FlatObjectiveError, OptimizerConfig, optimize_corrections
from .scenarios import ScenarioError, parse_scenario, read_scenario, write_scenario
from .teleportation import ConfigError, pauli_set
from .validation import MIN_VALIDATION_SAMPLES, run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2, 3
HALF_CIRCLE_POINTS = 201


class UsageError(Exception):
    pass


def _num(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _p_value(text) -> float:
    try:
        p = float(text)
    except (TypeError, ValueError):
        raise UsageError(f"p must be a number, got {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"p must lie in [0, 1], got {text}")
    return p


def _count(text) -> int:
    """Parse integers that may be written like 1e6."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _seed(text) -> int:
    value = _count(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(x) for x in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_report(scenario, p: float, mc: Optional[int] = None, seed: int = 0) -> dict:
    config = scenario.config()
    F = average_fidelity(config, p)
    D = fidelity_deviation(config, p)
    F_min, F_max = f_bounds(p)
    D_lower, D_upper = d_bounds(config, p)
    tri = region_triangle(p)
    report = {
        "scenario": scenario.name,
        "p": p,
        "classification": classify_channel(p).value,
        "F": F,
        "D": D,
        "bounds": {
            "F_min": F_min,
            "F_max": F_max,
            "D_lower": D_lower,
            "D_upper": D_upper,
            "half_circle": half_circle_bound(min(max(F, 0.0), 1.0)),
        },
        "region_triangle": {"p": tri.p, "D_max": tri.D_max, "vertices": [list(v) for v in tri.vertices]},
    }
    if mc is not None:
        moments = mc_fidelity_moments(config, p, SamplerConfig(seed=seed, n_samples=mc))
        F_est, D_est = moments.mean_estimate(), moments.std_estimate()
        report["mc"] = {
            "n": mc,
            "seed": seed,
            "F": {"mean": F_est.mean, "std_error": F_est.std_error},
            "D": {"mean": D_est.mean, "std_error": D_est.std_error},
        }
    return report


def _flatten_report(report: dict) -> tuple[list, list]:
    header = ["scenario", "p", "classification", "F", "D",
              "F_min", "F_max", "D_lower", "D_upper", "half_circle"]
    b = report["bounds"]
    row = [report["scenario"], report["p"], report["classification"], report["F"], report["D"],
           b["F_min"], b["F_max"], b["D_lower"], b["D_upper"], b["half_circle"]]
    for k, (F, D) in enumerate(report["region_triangle"]["vertices"]):
        header += [f"vertex{k}_F", f"vertex{k}_D"]
        row += [F, D]
    if "mc" in report:
        mc = report["mc"]
        header += ["mc_n", "mc_seed", "mc_F_mean", "mc_F_std_error", "mc_D_mean", "mc_D_std_error"]
        row += [mc["n"], mc["seed"], mc["F"]["mean"], mc["F"]["std_error"],
                mc["D"]["mean"], mc["D"]["std_error"]]
    return header, [row]


def cmd_analyze(args) -> int:
    scenario_text = args.scenario_opt or args.scenario
    p_text = args.p_opt if args.p_opt is not None else args.p
    if scenario_text is None or p_text is None:
        raise UsageError("analyze needs a scenario and p")
    scenario = parse_scenario(scenario_text)
    p = _p_value(p_text)
    if args.mc is not None and args.mc < MIN_SAMPLES:
        raise UsageError(f"--mc needs at least {MIN_SAMPLES} samples")
    report = build_report(scenario, p, args.mc, args.seed)
    if args.format == "csv":
        _emit(_csv_text(*_flatten_report(report)), args.out)
    else:
        _emit(_json_text(report), args.out)
    return EXIT_OK


def sweep_rows(scenario, p_start: float, p_end: float, steps: int) -> list[list]:
    config = scenario.config()
    rows = []
    for p in np.linspace(p_start, p_end, steps):
        p = float(p)
        F_min, F_max = f_bounds(p)
        rows.append([p, average_fidelity(config, p), fidelity_deviation(config, p),
                     F_min, F_max, d_bounds(config, p)[1]])
    return rows


def cmd_sweep(args) -> int:
    scenario = parse_scenario(args.scenario)
    p_start, p_end = _p_value(args.p_start), _p_value(args.p_end)
    if not p_start < p_end:
        raise UsageError(f"sweep range must satisfy p_start < p_end, got {p_start} .. {p_end}")
    if args.steps < 2:
        raise UsageError("sweep needs at least 2 steps")
    header = ["p", "F", "D", "F_min", "F_max", "D_upper"]
    rows = sweep_rows(scenario, p_start, p_end, args.steps)
    if args.format == "json":
        _emit(_json_text({"scenario": scenario.name, "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    return EXIT_OK


def region_data(p_list) -> dict:
    """Everything needed to redraw the attainable (F, D) region and its reference curves."""
    def triangle(p, label):
        tri = region_triangle(p)
        return {"label": label, "p": tri.p, "F_min": tri.F_min, "F_max": tri.F_max, "D_max": tri.D_max,
                "classification": classify_channel(p).value,
                "vertices": [list(v) for v in tri.vertices]}

    F_grid = np.linspace(0.0, 1.0, HALF_CIRCLE_POINTS)
    return {
        "triangles": [triangle(p, f"p={_num(p)}") for p in p_list],
        "reference_triangles": [triangle(1.0, "p=1"),
                                triangle(THRESHOLDS.p_CHSH, "p=p_CHSH"),
                                triangle(THRESHOLDS.p_separability, "p=p_separability")],
        "half_circle": [[float(F), half_circle_bound(float(F))] for F in F_grid],
        "classical_line": {"F": THRESHOLDS.F_classical,
                           "points": [[THRESHOLDS.F_classical, 0.0],
                                      [THRESHOLDS.F_classical, half_circle_bound(THRESHOLDS.F_classical)]]},
        "thresholds": {
            "p_separability": THRESHOLDS.p_separability,
            "p_CHSH": THRESHOLDS.p_CHSH,
            "p_LHV_lower": THRESHOLDS.p_LHV_lower,
            "p_LHV_upper": THRESHOLDS.p_LHV_upper,
            "F_classical": THRESHOLDS.F_classical,
        },
    }


def _region_rows(data: dict) -> list[list]:
    rows = []
    for series in ("triangles", "reference_triangles"):
        for tri in data[series]:
            for k, (F, D) in enumerate(tri["vertices"]):
                rows.append([series[:-1], tri["label"], tri["p"], k, F, D])
    for k, (F, D) in enumerate(data["half_circle"]):
        rows.append(["half_circle", "D=sqrt(F(1-F))", "", k, F, D])
    for k, (F, D) in enumerate(data["classical_line"]["points"]):
        rows.append(["classical_line", "F=2/3", "", k, F, D])
    return rows


def cmd_region(args) -> int:
    p_list = [_p_value(p) for p in args.p]
    data = region_data(p_list)
    if args.format == "csv":
        _emit(_csv_text(["series", "label", "p", "index", "F", "D"], _region_rows(data)), args.out)
    else:
        _emit(_json_text(data), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    source = args.source
    if source == "pauli":
        U = pauli_set()
    else:
        path = source[len("file:"):] if source.startswith("file:") else source
        U = [r.unitary() for r in read_scenario(path, require_v=False).U]
    p = _p_value(args.p)
    cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, tol=args.tol, seed=args.seed)
    result = optimize_corrections(U, p, cfg)
    payload = {
        "p": p,
        "F_best": result.F_best,
        "F_max": result.F_max,
        "D_at_best": result.D_at_best,
        "converged": result.converged,
        "restart_index": result.restart_index,
        "best_V": [{"polar": float(result.best_params[3 * k]),
                    "azimuth": float(result.best_params[3 * k + 1]),
                    "angle": float(result.best_params[3 * k + 2])} for k in range(4)],
        "trajectory": [[int(i), float(F)] for i, F in result.trajectory],
    }
    _emit(_json_text(payload), args.out)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_validate(args) -> int:
    if args.samples < MIN_VALIDATION_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_VALIDATION_SAMPLES}, got {args.samples}")
    report = run_validation(args.samples, args.seed, covariance=measures.covariance_element)
    _emit("\n".join(report.lines()) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_scenario(args) -> int:
    scenario = parse_scenario(args.scenario)
    text = json.dumps(scenario.to_json(), indent=2) + "\n"
    if args.out:
        write_scenario(scenario, args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telefid",
        description="Average fidelity F and fidelity deviation D of qubit teleportation "
                    "through a Werner channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    scenario_help = ("optimal | permuted[:a,b,c,d] | random:SEED | file:PATH | PATH.json "
                     "(bare 'permuted' is the double swap 1,0,3,2)")

    a = sub.add_parser("analyze", help="closed-form F and D with their bounds for one scenario")
    a.add_argument("scenario", nargs="?", help=scenario_help)
    a.add_argument("p", nargs="?", help="Werner parameter in [0, 1]")
    a.add_argument("--scenario", dest="scenario_opt")
    a.add_argument("--p", dest="p_opt")
    a.add_argument("--mc", type=_count, help="also estimate F and D from this many Haar samples")
    a.add_argument("--seed", type=_seed, default=0)
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="F and D on a uniform grid of p")
    s.add_argument("scenario", help=scenario_help)
    s.add_argument("p_start")
    s.add_argument("p_end")
    s.add_argument("steps", type=_count)
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("region", help="attainable (F, D) regions with reference curves")
    r.add_argument("p", nargs="+")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out")
    r.set_defaults(func=cmd_region)

    o = sub.add_parser("optimize", help="search correction unitaries that maximize F")
    o.add_argument("source", help="pauli | file:PATH (scenario file, only U is used)")
    o.add_argument("p")
    o.add_argument("--restarts", type=_count, default=8)
    o.add_argument("--max-iters", type=_count, default=2000)
    o.add_argument("--tol", type=float, default=1e-8)
    o.add_argument("--seed", type=_seed, default=0)
    o.add_argument("--out")
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("validate", help="run the Monte-Carlo oracle suite")
    v.add_argument("--samples", type=_count, default=10 ** 6)
    v.add_argument("--seed", type=_seed, default=7)
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    w = sub.add_parser("scenario", help="write a scenario as an editable JSON file")
    w.add_argument("scenario", help=scenario_help)
    w.add_argument("--out")
    w.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError, ConfigError, FlatObjectiveError, ValueError) as exc:
        print(f"telefid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
