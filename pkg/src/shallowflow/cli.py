"""Command line entry point: ``shallowflow run | verify | check-config``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .errors import ConfigError, NumericalError
from .formats import parse_config

log = logging.getLogger("shallowflow")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _load(args):
    config = parse_config(args.config, args.set or ())
    if args.output_dir:
        config = config.with_output_dir(args.output_dir)
    return config


def cmd_run(args) -> int:
    from .simulation import run_config

    config = _load(args)
    summary = run_config(config, quiet=args.quiet)
    if not args.quiet:
        print(f"steps={summary.steps} t={summary.final_time:.6g} wall={summary.wall_seconds:.2f}s "
              f"h_min={summary.h_min:.4g} h_max={summary.h_max:.4g} residual={summary.residual:.3g}")
        for path in summary.outputs[-2:]:
            print(f"wrote {path}")
    return EXIT_OK


def cmd_check_config(args) -> int:
    config = _load(args)
    grid, _, _ = config.load_domain()
    config.rainfall()
    if not args.quiet:
        print(f"ok: {grid.nx}x{grid.ny} cells, dx={grid.dx:g}, t_end={config.t_end:g}, "
              f"order={config.cfl.order}, cfl={config.cfl.n_cfl:g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    print(f"# shallowflow {__version__} verify {args.suite}")
    ok = True
    for name in names:
        for result in SUITES[name]():
            print(result.line())
            ok = ok and result.passed
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shallowflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="key = value configuration file")
            p.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override a configuration key (repeatable)")
            p.add_argument("--output-dir", help="override output_dir")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("run", help="run a simulation")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check-config", help="validate a configuration without running")
    common(p)
    p.set_defaults(func=cmd_check_config)

    p = sub.add_parser("verify", help="run the analytic verification suites")
    p.add_argument("suite", nargs="?", default="all", choices=["lake", "ritter", "convergence", "all"])
    common(p, needs_config=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
