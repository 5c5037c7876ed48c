"""Command-line harness.

Subcommands::

    verify   --suite S --config FILE [--out FILE] [--format json|csv] [--no-timings]
    symbolic reduce --expr TEXT | --expr-file FILE
    eval     --expr TEXT --state JSON --t REAL [--grid N,L,HBAR]
    sweep    --config FILE --out FILE

Exit codes: 0 all checks passed, 1 at least one check failed,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dsl
from .grids import build_grid
from .harness import ConfigError, RunConfig, reports_to_csv, reports_to_json, run_suite
from .operators import apply
from .states import StateSpec, synthesize_state
from .stats import expectation

REFERENCE_GRID = (64, 20.0, 1.0)


def _read_expr(args) -> str:
    if getattr(args, "expr", None) is not None:
        return args.expr
    if getattr(args, "expr_file", None) is not None:
        with open(args.expr_file, "r", encoding="utf-8") as fh:
            return fh.read()
    raise ConfigError("one of --expr or --expr-file is required")


def _parse_grid(text: str):
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise ConfigError(f"--grid expects N,L[,HBAR], got {text!r}")
    n = int(parts[0])
    box = float(parts[1])
    hbar = float(parts[2]) if len(parts) == 3 else 1.0
    return build_grid(n, box, hbar)


def cmd_verify(args) -> int:
    config = RunConfig.load(args.config)
    reports = run_suite(config, args.suite)
    text = (reports_to_csv(reports) if args.format == "csv"
            else reports_to_json(reports, timings=not args.no_timings))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = sum(1 for r in reports if not r.passed)
    sys.stderr.write(f"{len(reports)} checks, {failed} failed\n")
    return 0 if failed == 0 else 1


def cmd_symbolic(args) -> int:
    if args.action != "reduce":
        raise ConfigError(f"unknown symbolic action {args.action!r}")
    ast = dsl.parse(_read_expr(args))
    print(dsl.render_poly(dsl.lower(ast)))
    return 0


def cmd_eval(args) -> int:
    if args.t == 0:
        raise ConfigError("time parameter must be nonzero")
    grid = _parse_grid(args.grid) if args.grid else build_grid(*REFERENCE_GRID)
    spec = StateSpec.from_json(args.state)
    f = synthesize_state(grid, spec)
    ast = dsl.parse(_read_expr(args))
    pipeline = dsl.compile_ast(ast, grid, args.t)
    ev = expectation(pipeline, f)
    dev = apply(pipeline, f) - ev.value * f
    print(json.dumps({
        "expectation": ev.value,
        "variance": dev.norm2(),
        "imag_leak": ev.imag_leak,
    }, indent=2))
    return 0


def cmd_sweep(args) -> int:
    config = RunConfig.load(args.config)
    reports = run_suite(config, "uncertainty")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(reports_to_csv(reports))
    failed = sum(1 for r in reports if not r.passed)
    sys.stderr.write(f"{len(reports)} checks, {failed} failed -> {args.out}\n")
    return 0 if failed == 0 else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uncertlab",
                                     description="time/energy operator verification lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a check suite against a config")
    p.add_argument("--suite", required=True,
                   choices=["commutators", "uncertainty", "asymptotics",
                            "symbolic", "dsl", "all"])
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-timings", action="store_true",
                   help="omit wall_ms fields (byte-stable reports)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("symbolic", help="exact algebra operations")
    p.add_argument("action", choices=["reduce"])
    p.add_argument("--expr")
    p.add_argument("--expr-file")
    p.set_defaults(func=cmd_symbolic)

    p = sub.add_parser("eval", help="expectation/variance of an expression on a state")
    p.add_argument("--expr")
    p.add_argument("--expr-file")
    p.add_argument("--state", required=True, help="StateSpec as JSON")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid", help="N,L[,HBAR]; default 64,20,1")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="uncertainty sweep to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, dsl.ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
