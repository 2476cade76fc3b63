"""``lcqft`` command-line entry point."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import ConfigParse, LcqftError, SchemaViolation
from .report import build_report, dumps, run_checks
from .suites import RunConfig, build_checks


def _steps(text: str) -> tuple[float, ...]:
    try:
        out = tuple(float(Fraction(s.strip())) for s in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad step list {text!r}") from None
    if len(out) < 2:
        raise argparse.ArgumentTypeError("need at least two steps")
    return out


def _common(p: argparse.ArgumentParser, mode: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0)
    if mode:
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--tolerance", type=float, default=None,
                   help="absolute tolerance for float mode (ignored in exact mode)")
    p.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    p.add_argument("--list-checks", action="store_true",
                   help="print the check names and exit without running them")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcqft", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lcqft {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("axioms", help="functor axioms, locality, timeslice, tensor structure")
    _common(p)
    p.add_argument("--spec", help="extra spacetime JSON to include")
    p.add_argument("--spacetimes", type=int, default=25)
    p.add_argument("--instances", type=int, default=10)

    p = sub.add_parser("rce", help="germs, propagation and relative Cauchy evolution")
    _common(p, mode=False)
    p.add_argument("--mode", dest="rce_mode", choices=("exact", "fd", "both"), default="both")
    p.add_argument("--spec", help="spacetime JSON for the fixture perturbation")
    p.add_argument("--kappa", help="perturbation JSON (needs --spec)")
    p.add_argument("--fd-steps", type=_steps, default=(1 / 64, 1 / 128))
    p.add_argument("--instances", type=int, default=10)

    p = sub.add_parser("bv", help="BV/BRST differentials and cohomology of toy gauge models")
    _common(p)
    p.add_argument("--model", action="append", default=[], help="model JSON (repeatable)")
    p.add_argument("--ghost-number", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("fields", help="natural fields, products and the BRST differential")
    _common(p)
    p.add_argument("--category")
    p.add_argument("--candidates")
    p.add_argument("--max-degree", type=int, default=2, help="degree of the exactness ansatz")

    p = sub.add_parser("all", help="every suite on the bundled fixtures")
    _common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.subcommand, seed=args.seed, mode=getattr(args, "mode", "exact"),
                    tolerance=args.tolerance)
    for key in ("spec", "kappa", "category", "candidates", "rce_mode", "fd_steps",
                "ghost_number", "max_degree", "spacetimes", "instances", "samples"):
        if hasattr(args, key):
            setattr(cfg, key, getattr(args, key))
    if getattr(args, "model", None):
        cfg.models = tuple(args.model)
    if cfg.kappa and not cfg.spec:
        raise ConfigParse("--kappa needs --spec")
    return cfg


def run(cfg: RunConfig, list_only: bool = False):
    checks = build_checks(cfg)
    if list_only:
        return [c.name for c in sorted(checks, key=lambda c: c.name)]
    records = run_checks(checks)
    return build_report(cfg.echo(), records, __version__)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run(cfg, args.list_checks)
    except FileNotFoundError as exc:
        print(f"lcqft: FileNotFound: {exc.filename}", file=sys.stderr)
        return 2
    except (ConfigParse, SchemaViolation) as exc:
        print(f"lcqft: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except LcqftError as exc:
        print(f"lcqft: ConfigParse: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.list_checks:
        print("\n".join(result))
        return 0
    text = dumps(result)
    if args.report:
        args.report.write_text(text)
    s = result["summary"]
    for rec in result["checks"]:
        if rec["status"] == "fail":
            print(f"FAIL {rec['name']}: {rec.get('witness')}", file=sys.stderr)
    print(f"{cfg.subcommand}: {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped")
    return 0 if result["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
