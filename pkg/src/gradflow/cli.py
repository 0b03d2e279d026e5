"""Command-line entry point.

Subcommands::

    gradflow run <config>                      single simulation
    gradflow compare <config>                  full vs normal-only pair
    gradflow sweep <config> --dt-ladder a,b,c  dt convergence ladder

Common options: ``--out DIR`` overrides the configured output directory;
``--threads N`` (or the ``GRADFLOW_THREADS`` environment variable) sets
the FFT worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, parse_config
from .runner import compare, run, sweep
from .spectral import set_fft_workers

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="path to a run configuration file")
    parser.add_argument(
        "--out",
        default=None,
        help="output directory (default: run.output_dir from the config)",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="FFT worker threads (default: GRADFLOW_THREADS or 1)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradflow",
        description="Pseudospectral surface gradient-flow simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("run", help="run one simulation"))
    _add_common(
        sub.add_parser(
            "compare", help="run the fully coupled and normal-only variants side by side"
        )
    )
    p_sweep = sub.add_parser("sweep", help="run a time-step convergence ladder")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--dt-ladder",
        required=True,
        metavar="a,b,c",
        help="comma-separated decreasing list of time steps (at least three)",
    )
    p_sweep.add_argument(
        "--quantity",
        choices=("mass_error", "trajectory_error"),
        default="mass_error",
        help="error measure for the observed order (default: mass_error)",
    )
    return parser


def _configure_threads(arg_value: int | None) -> None:
    if arg_value is None:
        env = os.environ.get("GRADFLOW_THREADS", "").strip()
        if not env:
            return
        try:
            arg_value = int(env)
        except ValueError:
            raise SystemExit(f"GRADFLOW_THREADS must be an integer, got {env!r}")
    try:
        set_fft_workers(arg_value)
    except ValueError as exc:
        raise SystemExit(str(exc))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    _configure_threads(args.threads)

    try:
        text = open(args.config).read()
    except OSError as exc:
        print(f"error: cannot read config '{args.config}': {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out if args.out is not None else config.output_dir

    if args.command == "run":
        code = run(config, out)
        if code != 0:
            print("run aborted; see report.txt and last_valid.sgf", file=sys.stderr)
        return code

    if args.command == "compare":
        result = compare(config, out)
        print(f"energy_ordered = {'true' if result.energy_ordered else 'false'}")
        print(
            "final_range_smaller = "
            f"{'true' if result.final_range_smaller else 'false'}"
        )
        return 0

    # sweep
    try:
        ladder = [float(part) for part in args.dt_ladder.split(",") if part.strip()]
    except ValueError:
        print(f"error: --dt-ladder must be comma-separated numbers, got {args.dt_ladder!r}", file=sys.stderr)
        return 2
    try:
        rows = sweep(config, ladder, out, quantity=args.quantity)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for row in rows:
        order = "-" if row.observed_order is None else f"{row.observed_order:.3f}"
        print(f"dt = {row.parameter:.6g}  error = {row.error:.6e}  order = {order}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
