"""Command-line experiment runner.

Subcommands: ``run`` (execute a sweep from a config file), ``validate``
(sweep plus analytic-vs-Monte-Carlo agreement report), ``reproduce``
(frozen figure presets fig1..fig4), ``lambda-star`` (grid search of the
power split).  Exit codes: 0 success, 1 validation failure, 2 config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config, with_overrides
from .errors import ConfigError, DomainError, NumericalError, ParameterError
from .sweep import (
    figure_preset,
    find_lambda_star,
    plot_script_path,
    run_sweep,
    validate_sweep,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twrelay",
        description="Two-way energy-harvesting relay performance lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a sweep described by a config file")
    run_p.add_argument("--config", required=True, help="path to key = value config")
    run_p.add_argument("--workers", type=int, help="Monte Carlo worker processes")

    val_p = sub.add_parser(
        "validate", help="run a sweep and judge analytic-vs-MC agreement"
    )
    val_p.add_argument("--config", required=True)
    val_p.add_argument("--workers", type=int)

    rep_p = sub.add_parser("reproduce", help="run a frozen figure preset")
    rep_p.add_argument("--figure", type=int, required=True, choices=(1, 2, 3, 4))
    rep_p.add_argument("--n", type=int, help="Monte Carlo sample count override")
    rep_p.add_argument("--seed", type=int, help="root seed override")
    rep_p.add_argument("--out", default=".", help="output directory")
    rep_p.add_argument("--workers", type=int)

    ls_p = sub.add_parser("lambda-star", help="grid-search the power split")
    ls_p.add_argument("--config", required=True)
    ls_p.add_argument("--workers", type=int)
    return parser


def _configured(args):
    config = load_config(args.config)
    if getattr(args, "workers", None):
        config = with_overrides(config, workers=args.workers)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _configured(args)
            result = run_sweep(config)
            print(f"wrote {config.output_path} ({len(result.rows)} rows)")
            print(f"wrote {plot_script_path(config)}")
            print(f"wall time: {result.wall_time_s:.2f} s", file=sys.stderr)
            return EXIT_OK
        if args.command == "validate":
            config = _configured(args)
            report = validate_sweep(config)
            print(report.text(), end="")
            print(f"wrote {report.report_path}")
            return EXIT_OK if report.passed else EXIT_VALIDATION
        if args.command == "reproduce":
            config = figure_preset(args.figure, n=args.n, seed=args.seed, out_dir=args.out)
            if args.workers:
                config = with_overrides(config, workers=args.workers)
            result = run_sweep(config)
            print(f"wrote {config.output_path} ({len(result.rows)} rows)")
            print(f"wrote {plot_script_path(config)}")
            print(f"wall time: {result.wall_time_s:.2f} s", file=sys.stderr)
            return EXIT_OK
        if args.command == "lambda-star":
            config = _configured(args)
            best = find_lambda_star(config)
            flat_note = " (flat grid; returning the first point)" if best.flat else ""
            print(
                f"lambda_star = {best.lambda_star:.6g}  value = {best.value:.6g}  "
                f"bracket = [{best.bracket[0]:.6g}, {best.bracket[1]:.6g}]{flat_note}"
            )
            return EXIT_OK
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
