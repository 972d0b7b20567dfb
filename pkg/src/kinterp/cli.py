"""Command line interface: verify / suite / conditions / sv-check."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .conditions import DEFAULT_BUDGET
from .errors import KinterpError, ScenarioError
from .quadrature import LogGrid
from .runner import EXIT_VALIDATION, run_scenario, run_suite
from .scenario import load_scenario
from .sv import check_sv_envelope, sv_from_json


def _add_grid_args(p):
    p.add_argument("--grid-min", type=float, default=None,
                   help="override grid t_min")
    p.add_argument("--grid-max", type=float, default=None,
                   help="override grid t_max")
    p.add_argument("--ppd", type=int, default=None,
                   help="override grid points per decade")


def _apply_overrides(sc, args):
    grid = sc.grid
    if any(v is not None for v in (args.grid_min, args.grid_max, args.ppd)):
        grid = LogGrid(
            t_min=args.grid_min if args.grid_min is not None else grid.t_min,
            t_max=args.grid_max if args.grid_max is not None else grid.t_max,
            points_per_decade=args.ppd if args.ppd is not None
            else grid.points_per_decade)
    budget = args.cmax if getattr(args, "cmax", None) is not None else sc.budget
    return replace(sc, grid=grid, budget=budget)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinterp",
        description="Numerical verification of two-sided K-functional "
                    "estimates between K-interpolation spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run one scenario end to end")
    verify.add_argument("--scenario", type=Path, required=True)
    verify.add_argument("--out", type=Path, default=Path("reports"))
    _add_grid_args(verify)
    verify.add_argument("--cmax", type=float, default=None,
                        help="override the ratio budget")

    suite = sub.add_parser("suite", help="run every scenario in a directory")
    suite.add_argument("--dir", type=Path, required=True)
    suite.add_argument("--out", type=Path, default=Path("reports"))
    suite.add_argument("--workers", type=int, default=None,
                       help="worker count (default: KINTERP_WORKERS or CPUs)")

    cond = sub.add_parser("conditions",
                          help="run only the condition checks of a scenario")
    cond.add_argument("--scenario", type=Path, required=True)
    cond.add_argument("--only", type=str, default=None,
                      help="comma separated subset, e.g. C2,C3")
    cond.add_argument("--out", type=Path, default=Path("reports"))
    _add_grid_args(cond)
    cond.add_argument("--cmax", type=float, default=None)

    svc = sub.add_parser("sv-check",
                         help="monotone-envelope scan of a slowly varying "
                              "function descriptor")
    svc.add_argument("--b", type=str, required=True,
                     help="descriptor JSON (inline or a file path)")
    svc.add_argument("--eps", type=float, required=True)
    _add_grid_args(svc)
    svc.add_argument("--cmax", type=float, default=DEFAULT_BUDGET)
    return parser


def _print_result(result):
    for cid, rep in sorted(result.condition_reports.items()):
        print(f"{result.name}: {cid} {rep.verdict} "
              f"(sup ratio {rep.sup_ratio!r})")
    if result.equivalence is not None:
        for v in result.equivalence.variants:
            detail = ("" if v.verdict == "not_applicable"
                      else f" (ratio in [{v.inf_ratio!r}, {v.sup_ratio!r}])")
            print(f"{result.name}: {v.variant} {v.verdict}{detail}")
    if result.error:
        print(f"{result.name}: error: {result.error}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            sc = _apply_overrides(load_scenario(args.scenario), args)
            result = run_scenario(sc, args.out)
            _print_result(result)
            return result.exit_code

        if args.command == "suite":
            summary, code = run_suite(args.dir, args.out,
                                      workers=args.workers)
            for row in summary["scenarios"]:
                print(f"{row['name']}: {row['status']}")
            print(f"suite: {summary['count']} scenario(s), exit {code}")
            return code

        if args.command == "conditions":
            sc = _apply_overrides(load_scenario(args.scenario), args)
            only = None
            if args.only:
                only = tuple(s.strip() for s in args.only.split(",") if s.strip())
            result = run_scenario(sc, args.out, checks_only=only or sc.checks)
            _print_result(result)
            return result.exit_code

        if args.command == "sv-check":
            raw = args.b
            path = Path(raw)
            if path.exists():
                raw = path.read_text(encoding="utf-8")
            try:
                desc = sv_from_json(json.loads(raw))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ScenarioError(f"--b: {exc}") from exc
            grid = LogGrid(
                t_min=args.grid_min if args.grid_min is not None else 1e-8,
                t_max=args.grid_max if args.grid_max is not None else 1e8,
                points_per_decade=args.ppd if args.ppd is not None else 16)
            rep = check_sv_envelope(desc, args.eps, grid, budget=args.cmax)
            print(json.dumps(rep.summary(), indent=2, sort_keys=True))
            return 0 if rep.passed else 3
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KinterpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
