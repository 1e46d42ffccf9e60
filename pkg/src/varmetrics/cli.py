#!/usr/bin/env python3
"""
varmetrics command line

One subcommand per registered command. Results print as a single value or
CSV, or as a JSON object with --json. Exit status is 0 on success, 1 on
domain errors and 2 on usage errors.
"""

import argparse
import asyncio
import dataclasses
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from varmetrics import __version__, command_registry
from varmetrics.asymptotics import ESTIMATORS
from varmetrics.config import PROFILES, settings
from varmetrics.errors import VarmetricsError
from varmetrics.output import render_json, render_text
from varmetrics.probspace import SPEC_GRAMMAR
from varmetrics.variability import MEASURE_NAMES

logger = logging.getLogger(__name__)


def _level(text: str) -> Union[float, Fraction]:
    """A level as a decimal or an exact fraction such as 1/10"""
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid level '{text}'")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON object instead of CSV")
    common.add_argument("--precision", type=_positive_int, default=None,
                        help=f"significant digits in output (default {settings.precision})")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varmetrics",
        description="Variability measures induced by VaR, ES and expectiles",
        epilog=SPEC_GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    common = _common_flags()

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common], epilog=SPEC_GRAMMAR,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(command=name)
        return p

    p = add("measure", "evaluate a risk or variability measure")
    p.add_argument("--dist", required=True, help="distribution spec")
    p.add_argument("--measure", required=True, choices=MEASURE_NAMES)
    p.add_argument("--p", type=_level, default=None, help="level, decimal or a/b")
    p.add_argument("--allow-any-level", action="store_true",
                   help="accept levels outside the usual domain with a warning")

    p = add("asymvar", "asymptotic variance of an empirical estimator")
    p.add_argument("--dist", required=True, help="distribution spec")
    p.add_argument("--estimator", required=True, choices=ESTIMATORS)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tol", type=float, default=None, help="absolute quadrature tolerance")

    p = add("simulate", "Monte Carlo check of asymptotic normality")
    p.add_argument("--dist", required=True, help="distribution spec")
    p.add_argument("--estimator", required=True, choices=ESTIMATORS)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--profile", choices=sorted(PROFILES), default=None)
    p.add_argument("--bins", type=_positive_int, default=None)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--out", default=None, help="histogram CSV")

    p = add("calibrate", "match ES and expectile levels to a quantile level")
    p.add_argument("--dist", required=True, help="distribution spec")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--p", type=float)
    target.add_argument("--grid", help="start:stop[:step]")
    p.add_argument("--out", default=None, help="curve CSV")

    p = add("rolling", "rolling-window variability ratios")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--prices", help="date,close CSV")
    source.add_argument("--losses", help="date,loss CSV")
    p.add_argument("--window", type=_positive_int, default=253)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--triple", type=int, choices=(1, 2, 3), default=2,
                   help="rule-of-thumb triple used without --p/--q/--r")
    p.add_argument("--out", default=None, help="ratio CSV")

    p = add("synth-losses", "iid synthetic losses for the rolling pipeline")
    p.add_argument("--dist", required=True, help="distribution spec")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--start", default="2000-01-03")
    p.add_argument("--out", default=None, help="losses CSV")

    p = add("selftest", "run an executable property suite")
    p.add_argument("suite", choices=("table1", "identities"))
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=None)

    return parser


def _command_args(command: str, parsed: argparse.Namespace) -> Dict[str, Any]:
    names = {f.name for f in dataclasses.fields(command_registry.get_schema(command))}
    return {k: v for k, v in vars(parsed).items() if k in names}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    precision = args.precision or settings.precision

    try:
        result = asyncio.run(command_registry.call_command(args.command, _command_args(args.command, args)))
    except (VarmetricsError, OSError) as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"❌ Error: {e}", file=sys.stderr)
        return 1

    if args.json:
        print(render_json(result, precision))
    else:
        sys.stdout.write(render_text(result, precision))
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
