"""Command-line front door: verify candidates, compute statistics, run experiments.

Exit codes: 0 for success or a confirmed expected outcome, 1 when verification
contradicts the target's claim or an exact invariance was violated, 2 for
usage, input, or configuration errors. JSON outputs are written exactly as the
underlying modules serialize them; the text tables round to 6 significant
digits and mark exact zeros.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import DEFAULT_TOL, GridSpec, verify_copula
from .csvio import load_grid_csv, load_sample_csv
from .errors import ConfigError, CopulaLabError
from .experiments import (
    load_config_file,
    load_shipped_config,
    run_battery,
    shipped_config_names,
    threads_from_env,
)
from .families import builtin_names, counterexample_findings, resolve_builtin
from .stats import dependence_report

EXIT_OK = 0
EXIT_CONTRADICTION = 1
EXIT_USAGE = 2


def _fmt(x) -> str:
    if isinstance(x, float):
        if x == 0.0:
            return "0 (exact)"
        return f"{x:.6g}"
    return str(x)


def _fmt_witness(witness: dict | None) -> str:
    if witness is None:
        return "-"
    if "u" in witness:
        return f"({witness['u']:.6g}, {witness['v']:.6g})"
    return (
        f"[{witness['u1']:.6g}, {witness['u2']:.6g}] x "
        f"[{witness['v1']:.6g}, {witness['v2']:.6g}]"
    )


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _print_report_table(reports: list[dict]) -> None:
    print(f"{'check':<30} {'result':<6} {'violation':<14} witness")
    for report in reports:
        result = "pass" if report["passed"] else "FAIL"
        print(
            f"{report['check_name']:<30} {result:<6} "
            f"{_fmt(report['violation']):<14} {_fmt_witness(report['witness'])}"
        )


def cmd_verify(args) -> int:
    if (args.builtin is None) == (args.csv is None):
        print("error: provide exactly one of --builtin NAME or --csv PATH", file=sys.stderr)
        return EXIT_USAGE
    grid = GridSpec(args.grid_n)
    if args.builtin is not None:
        target = resolve_builtin(args.builtin, theta=args.theta)
        source = {"source": "builtin"}
    else:
        target = load_grid_csv(args.csv)
        source = {"source": "csv", "interpolation": "bilinear"}

    reports = verify_copula(target, grid, args.tol, adjacent_only=args.adjacent_only)
    all_passed = all(r.passed for r in reports)
    consistent = all_passed if target.is_copula_claim else not all_passed

    payload = {
        "schema_version": 1,
        "target": {**target.to_json_dict(), **source},
        "grid_n": grid.n,
        "tolerance": args.tol,
        "adjacent_only": args.adjacent_only,
        "consistent_with_claim": consistent,
        "reports": [r.to_json_dict() for r in reports],
    }
    if args.json:
        _write_json(args.json, payload)

    claim = "copula" if target.is_copula_claim else "counterexample (failures expected)"
    print(f"target: {target.name}  [{claim}]")
    rectangles = "adjacent cells" if args.adjacent_only else "all grid rectangles"
    print(f"grid: n={grid.n}  tol={args.tol:.6g}  rectangles: {rectangles}")
    _print_report_table(payload["reports"])
    print(f"outcome: {'consistent with' if consistent else 'CONTRADICTS'} the target's claim")
    return EXIT_OK if consistent else EXIT_CONTRADICTION


def cmd_stats(args) -> int:
    sample = load_sample_csv(args.csv)
    report = dependence_report(sample)
    payload = {"schema_version": 1, **report.to_json_dict()}
    if args.json:
        _write_json(args.json, payload)
    print(f"n: {report.n}")
    print(f"kendall_tau: {_fmt(report.kendall_tau)}")
    print(f"spearman_rho: {_fmt(report.spearman_rho)}")
    print(f"pearson_rho: {_fmt(report.pearson_rho)}")
    print(f"tie_adjusted: {'true' if report.tie_adjusted else 'false'}")
    return EXIT_OK


def cmd_invariance(args) -> int:
    if Path(args.config).is_file():
        configs = load_config_file(args.config)
    elif args.config in shipped_config_names():
        configs = load_shipped_config(args.config)
    else:
        raise ConfigError(
            f"config {args.config!r} is neither a file nor a shipped config "
            f"(shipped: {', '.join(shipped_config_names())})"
        )
    if args.seed is not None:
        configs = [
            type(cfg)(**{**cfg.__dict__, "seed": args.seed}) for cfg in configs
        ]
    report = run_battery(configs)
    payload = report.to_json_dict()
    if args.json:
        _write_json(args.json, payload)

    for record in payload["experiments"]:
        cfg = record["config"]
        print(
            f"experiment {record['index']}: {cfg['experiment']}  "
            f"seed={cfg['seed']}  n={cfg['n_samples']}  reps={cfg['repetitions']}"
        )
        print(f"  class: {record['transform_class']}")
        print(f"  {'statistic':<26} {'before':<13} {'after':<13} {'|delta|':<14} exact_expected")
        for row in record["results"]:
            print(
                f"  {row['statistic_name']:<26} {_fmt(row['before']):<13} "
                f"{_fmt(row['after']):<13} {_fmt(row['abs_delta']):<14} "
                f"{'yes' if row['exact_expected'] else 'no'}"
            )
    print("summary:")
    for row in payload["summary"]:
        print(
            f"  [{row['experiment_index']}] {row['transforms']}: "
            f"{row['statistic']} -> {row['preservation']} "
            f"(max |delta| = {_fmt(row['max_abs_delta'])})"
        )
    held = payload["all_exact_invariances_held"]
    print(f"all exact invariances held: {'yes' if held else 'NO'}")
    return EXIT_OK if held else EXIT_CONTRADICTION


def cmd_counterexamples(args) -> int:
    payload = counterexample_findings(GridSpec(args.grid_n), args.tol)
    if args.json:
        _write_json(args.json, payload)
    for entry in payload["counterexamples"]:
        print(f"counterexample: {entry['name']}")
        _print_report_table(entry["reports"])
        findings = entry["findings"]
        if "unit_square_volume" in findings:
            print(f"finding: volume of the unit square = {_fmt(findings['unit_square_volume'])}")
        if "decreasing_segment" in findings:
            seg = findings["decreasing_segment"]
            print(
                "finding: decreasing along v="
                f"{seg['line_v']:g}: value drops from {_fmt(seg['value_start'])} at "
                f"u={seg['u_start']:.6g} to {_fmt(seg['value_end'])} at u={seg['u_end']:.6g}"
            )
        print()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copula-lab",
        description="Verify copula axioms on grids, compute rank statistics, "
        "and run transform-invariance experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the axiom checks against a builtin or a CSV grid")
    verify.add_argument("--builtin", help=f"builtin name; one of: {', '.join(builtin_names())}")
    verify.add_argument("--csv", help="path to a tabulated grid CSV (header u,v,value)")
    verify.add_argument("--grid-n", type=int, default=21, help="grid points per axis (default 21)")
    verify.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tolerance (default 1e-9)")
    verify.add_argument("--theta", type=float, default=0.5, help="fgm parameter (default 0.5)")
    verify.add_argument(
        "--adjacent-only",
        action="store_true",
        help="check only adjacent grid cells for the rectangle-volume axiom",
    )
    verify.add_argument("--json", help="also write the full report to this JSON file")
    verify.set_defaults(handler=cmd_verify)

    stats = sub.add_parser("stats", help="dependence coefficients of a two-column CSV sample")
    stats.add_argument("--csv", required=True, help="path to the sample CSV")
    stats.add_argument("--json", help="also write the report to this JSON file")
    stats.set_defaults(handler=cmd_stats)

    invariance = sub.add_parser("invariance", help="run an experiment battery from a config")
    invariance.add_argument(
        "--config",
        required=True,
        help=f"config JSON path or shipped name ({', '.join(shipped_config_names())})",
    )
    invariance.add_argument(
        "--seed", type=int, default=None, help="override the seed of every experiment"
    )
    invariance.add_argument("--json", help="also write the battery report to this JSON file")
    invariance.set_defaults(handler=cmd_invariance)

    counter = sub.add_parser(
        "counterexamples", help="verify the two bundled non-copula counterexamples"
    )
    counter.add_argument("--grid-n", type=int, default=21, help="grid points per axis (default 21)")
    counter.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tolerance (default 1e-9)")
    counter.add_argument("--json", help="also write the findings to this JSON file")
    counter.set_defaults(handler=cmd_counterexamples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep the contract
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        threads_from_env()  # validate the env cap before any computation
        return args.handler(args)
    except (CopulaLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # exit codes are contractually 0, 1, or 2
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
