"""Command-line front end: ``verify``, ``sweep`` and ``export``.

Exit status: 0 when every exact and convergent check passes, 1 when at
least one fails (the report is still written), 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .matcore import to_csv
from .suite import (EXPORTS, SUITES, ConfigError, SuiteConfig, export_operator, run_suite,
                    sweep)


def _tolerance(text: str) -> tuple[str, float]:
    try:
        cid, val = text.split("=", 1)
        return cid.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ID=VALUE, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser, suite_required: bool = True,
                dim_required: bool = True) -> None:
    p.add_argument("--suite", choices=SUITES, default="all" if not suite_required else None,
                   required=suite_required)
    p.add_argument("--k", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--dim", type=int, required=dim_required)
    p.add_argument("--window", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--report", help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tolerance", type=_tolerance, action="append", default=[],
                   metavar="ID=VALUE", help="override one catalog tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su11lab", description="Residual checks for truncated su(1,1) time operators.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("verify", help="run a check suite"))
    sw = sub.add_parser("sweep", help="run a suite over a list of dimensions or frequencies")
    sw.add_argument("--axis", choices=("dim", "omega"), required=True)
    sw.add_argument("--values", required=True, help="comma-separated, strictly monotone")
    sw.add_argument("--check", action="append", default=[], help="restrict to one check id (repeatable)")
    _add_common(sw, suite_required=False, dim_required=False)
    ex = sub.add_parser("export", help="write one operator matrix as CSV")
    ex.add_argument("--operator", required=True, help=", ".join(EXPORTS))
    ex.add_argument("--out", required=True)
    _add_common(ex, suite_required=False)
    return parser


def _config(args, N: int | None = None) -> SuiteConfig:
    if args.k is not None and args.g is not None:
        raise ConfigError("--k and --g are mutually exclusive")
    return SuiteConfig(N=N if N is not None else args.dim, k=args.k, g=args.g, window=args.window,
                       omega=args.omega, suite=args.suite, tolerances=dict(args.tolerance),
                       output=args.report, format=args.format)


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(report) -> None:
    for c in report.checks:
        res = "error" if c["residual"] is None else f"{c['residual']:.3e}"
        print(f"{c['status']:>6}  {c['id']:<28} {res}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()  # usage errors exit with 2 through argparse
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            cfg = _config(args).validate()
            report = run_suite(cfg)
            _emit(report.render(cfg.format), cfg.output)
            _summary(report)
            return report.exit_code()
        if args.command == "sweep":
            try:
                values = [float(v) for v in args.values.split(",") if v.strip()]
            except ValueError:
                raise ConfigError(f"cannot parse --values {args.values!r}") from None
            N = args.dim if args.dim is not None else (int(values[0]) if args.axis == "dim" else None)
            if N is None:
                raise ConfigError("--dim is required for an omega sweep")
            cfg = _config(args, N)
            result = sweep(cfg, args.axis, values, args.check or None)
            _emit(result.render(cfg.format), cfg.output)
            return result.exit_code()
        cfg = _config(args)
        A = export_operator(args.operator, cfg)
        Path(args.out).write_text(to_csv(A))
        return 0
    except ConfigError as exc:
        print(f"su11lab: configuration error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
