"""Command-line front end: run the suite, sweep a case, list the cases."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, QQFueterError
from .harness import CASES, SuiteConfig, convergence_sweep, load_config_file, run_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qqfueter",
        description="Verify the deformed quaternionic operator identities by quadrature.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run verification cases and write a report")
    run_p.add_argument("--config", default=None, help="JSON configuration file")
    run_p.add_argument(
        "--case",
        action="append",
        default=None,
        metavar="ID",
        help="case id to run (repeatable; default: all configured cases)",
    )
    run_p.add_argument("--report-dir", default="reports", help="artifact directory")
    run_p.add_argument("--threads", type=int, default=1, help="case-level worker threads")

    sweep_p = sub.add_parser("sweep", help="refinement sweep for one case")
    sweep_p.add_argument("--case", required=True, metavar="ID")
    sweep_p.add_argument("--levels", type=int, default=3)
    sweep_p.add_argument("--config", default=None)
    sweep_p.add_argument("--report-dir", default="reports")

    sub.add_parser("list-cases", help="list available case ids")
    return parser


def _load(config_path) -> SuiteConfig:
    if config_path is None:
        return SuiteConfig()
    return load_config_file(config_path)


def cmd_run(args) -> int:
    config = _load(args.config)
    report = run_suite(
        config,
        case_ids=args.case,
        threads=max(1, args.threads),
        report_dir=args.report_dir,
    )
    import math

    for res in report.results:
        gated = [r.rel_residual for r in res.rows
                 if math.isfinite(r.tolerance) and r.rel_residual == r.rel_residual]
        worst = max(gated, default=float("nan"))
        verdicts = {r.verdict for r in res.rows}
        state = "ERROR" if "ERROR" in verdicts else ("FAIL" if "FAIL" in verdicts else "PASS")
        print(f"{res.case_id:36s} {state:6s} rows={len(res.rows):3d} "
              f"worst_rel={worst:.3e} t={res.seconds:.2f}s")
    print(f"total {report.total_seconds:.2f}s -> report in {args.report_dir}")
    return report.exit_code()


def cmd_sweep(args) -> int:
    config = _load(args.config)
    sweep = convergence_sweep(config, args.case, levels=args.levels)
    from .reporting import write_sweep

    paths = write_sweep(sweep, args.report_dir)
    for row in sweep.rows:
        print(f"level {row['level']}: parameter={row['parameter']:.6g} "
              f"residual={row['residual']:.6e}")
    print(f"fitted order: {sweep.fitted_order:.3f} -> {paths['csv']}")
    return 0


def cmd_list_cases() -> int:
    width = max(len(cid) for cid in CASES)
    for cid in sorted(CASES):
        print(f"{cid:{width}s}  {CASES[cid].description}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_list_cases()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except QQFueterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
