# -*- coding: utf-8 -*-
"""Command line interface

run from terminal with

.. code-block:: bash

    usage: zins [-h] [--config PATH] [--preset NAME] [--seed U64] [--threads N]
                [--out PATH] [--no-inverse-drift] [--psi-exponent Q]
                [--plot-data PATH] [--regimes PATH] [-v]
                {validate,simulate,converge,compare-schemes,price-bond,price-barrier}

    Simulation of a hybrid short rate model with delayed volatility

    positional arguments:
      {validate,simulate,converge,compare-schemes,price-bond,price-barrier}

    optional arguments:
      -h, --help          show this help message and exit
      --config PATH       JSON run configuration
      --preset NAME       start from a built-in preset
      --seed U64          master seed
      --threads N         size of the worker pool
      --out PATH          CSV output, stdout if omitted
      --no-inverse-drift  drop the x^-1 drift term
      --psi-exponent Q    exponent q of psi(delta) = delta^-q
      --plot-data PATH    simulate: stair coordinates of the step process
      --regimes PATH      simulate: the regime trajectory
      -v, --verbose       log debug messages

Exit codes are 0 on success, 3 for configuration errors, 4 for failed
validation and 5 for numerical failures. After a numerical failure, the
noise of the offending path is written to ``<out>.replay.bin``.
"""
import argparse
import logging
import sys
from pathlib import Path

from zins.errors import (
    ConfigError,
    DivisibilityError,
    GeneratorError,
    NumericalError,
    TruncationError,
)
from zins.model import _defaults as presets
from zins.scheme import replay_noise, write_noise_record
from zins._cli import commands
from zins._cli.config import RunConfig

log = logging.getLogger("zins")

COMMANDS = (
    "validate",
    "simulate",
    "converge",
    "compare-schemes",
    "price-bond",
    "price-barrier",
)


def overrides_from(args: argparse.Namespace) -> dict:
    "the configuration sections set by flags"
    overrides = {}
    if args.preset is not None:
        overrides["preset"] = args.preset
    simulation = {}
    if args.seed is not None:
        simulation["seed"] = args.seed
    if args.threads is not None:
        simulation["threads"] = args.threads
    if simulation:
        overrides["simulation"] = simulation
    if args.no_inverse_drift:
        overrides["model"] = {"include_inverse_drift": False}
    if args.psi_exponent is not None:
        overrides["truncation"] = {"psi_exponent": args.psi_exponent}
    return overrides


def run(args: argparse.Namespace) -> int:
    "execute a parsed command line and return the exit code"
    config = None
    try:
        config = RunConfig.from_file(args.config, overrides_from(args))
        if args.command == "validate":
            return commands.cmd_validate(config, args.out)
        if args.command == "simulate":
            return commands.cmd_simulate(config, args.out, args.plot_data, args.regimes)
        if args.command == "converge":
            return commands.cmd_converge(config, args.out)
        if args.command == "compare-schemes":
            return commands.cmd_compare_schemes(config, args.out)
        return commands.cmd_price(config, args.command.split("-")[1], args.out)
    except (ConfigError, DivisibilityError, TruncationError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return commands.EXIT_CONFIG
    except GeneratorError as e:
        print(f"Validation error: {e}", file=sys.stderr)
        return commands.EXIT_VALIDATION
    except NumericalError as e:
        print(f"Numerical error: {e}", file=sys.stderr)
        replay = e.replay
        if args.out is not None and config is not None and "path_index" in replay:
            fname = Path(f"{args.out}.replay.bin")
            noise = replay_noise(replay, config.spec)
            write_noise_record(fname, noise, replay["M"], config.spec.jump_intensity)
            print(f"Noise of path {replay['path_index']} written to {fname}", file=sys.stderr)
        return commands.EXIT_NUMERICAL


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zins",
        description="Simulation of a hybrid short rate model with delayed volatility",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", dest="config", type=Path, help="JSON run configuration")
    parser.add_argument(
        "--preset", dest="preset", choices=sorted(presets), help="start from a built-in preset"
    )
    parser.add_argument("--seed", dest="seed", type=int, help="master seed")
    parser.add_argument("--threads", dest="threads", type=int, help="size of the worker pool")
    parser.add_argument("--out", dest="out", type=Path, help="CSV output, stdout if omitted")
    parser.add_argument(
        "--no-inverse-drift", action="store_true", help="drop the x^-1 drift term"
    )
    parser.add_argument(
        "--psi-exponent", dest="psi_exponent", type=float,
        help="exponent q of psi(delta) = delta^-q",
    )
    parser.add_argument(
        "--plot-data", dest="plot_data", type=Path,
        help="simulate: stair coordinates of the step process",
    )
    parser.add_argument(
        "--regimes", dest="regimes", type=Path, help="simulate: the regime trajectory"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    logging.captureWarnings(True)
    sys.exit(run(args))


if __name__ == "__main__":

    main()
