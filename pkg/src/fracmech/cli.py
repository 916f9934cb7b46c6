"""Command-line entry point: ``fracmech <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .config import ANALYSES, ConfigError, parse_config
from .output import emit_results
from .runner import run
from .solvers import NumericalFailure

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# dispersion flags map one-for-one onto config keys
_DISPERSION_FLAGS = {
    "alpha1": "alpha1", "alpha2": "alpha2", "lstar": "l_star", "E": "E", "rho": "rho",
    "rho_prime": "rho_prime", "kmin": "kmin", "kmax": "kmax", "n": "n",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracmech", description=__doc__)
    sub = parser.add_subparsers(dest="analysis", required=True, parser_class=_Parser)
    for name in ANALYSES:
        p = sub.add_parser(name, help=f"run a {name} analysis")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="DOT.PATH=VALUE",
                       help="override a configuration key (repeatable)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
        if name == "dispersion":
            p.add_argument("--alpha1", type=float)
            p.add_argument("--alpha2", type=float)
            p.add_argument("--lstar", type=float)
            p.add_argument("--E", type=float)
            p.add_argument("--rho", type=float)
            p.add_argument("--rho-prime", dest="rho_prime", type=float)
            p.add_argument("--inertia-gradient", action="store_true")
            p.add_argument("--kmin", type=float)
            p.add_argument("--kmax", type=float)
            p.add_argument("--n", type=int)
    return parser


def _overrides(args) -> list[str]:
    out = list(args.set)
    if args.analysis == "dispersion":
        for flag, key in _DISPERSION_FLAGS.items():
            v = getattr(args, flag)
            if v is not None:
                out.append(f"dispersion.{key}={v!r}")
        if args.inertia_gradient:
            out.append("dispersion.inertia_gradient=true")
    if args.out:
        out.append(f"output.path={args.out}")
    if args.format:
        out.append(f"output.format={args.format}")
    return out


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("fracmech: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(args.config, _overrides(args), analysis=args.analysis)
    except ConfigError as exc:
        print(f"fracmech: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(cfg, threads=args.threads)
    except NumericalFailure as exc:
        print(f"fracmech: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"fracmech: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    emit_results(table, cfg.output["format"], cfg.output["path"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
