"""Command line front end."""

from __future__ import annotations

import argparse
import inspect
import logging
import os
import sys
from typing import TYPE_CHECKING, NoReturn

from loguru import logger

from .commons import MpschedError, ScenarioError
from .const import DEFAULT_OUT_DIR, ENV_OUT_DIR, SCHEDULER_NAMES
from .harness import compare, run_batch
from .outputs import emit_outputs
from .presets import PRESETS, preset
from .scenario import describe, load_scenario
from .units import parse_duration
from .version import VERSION

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .scenario import ScenarioConfig

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2


class InterceptHandler(logging.Handler):
    """Route standard library log records into loguru."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno
        frame, depth = inspect.currentframe(), 0
        while frame and (depth == 0 or frame.f_code.co_filename == logging.__file__):
            frame = frame.f_back
            depth += 1
        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def setup_logging(verbosity: int) -> None:
    """WARNING with ``-q``, INFO by default, DEBUG with ``-v``."""
    level = "DEBUG" if verbosity > 0 else "WARNING" if verbosity < 0 else "INFO"
    logger.remove()
    logger.add(sys.stderr, level=level, format="<green>{time:HH:mm:ss}</green> <level>{level: <7}</level> {message}")
    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the validation status."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _duration(text: str) -> int:
    try:
        return parse_duration(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="preset name or scenario file")
    parser.add_argument("--seed", type=int, default=None, help="base seed, run k uses seed+k")
    parser.add_argument("--runs", type=int, default=None, help="runs per scheduler")
    parser.add_argument("--sim-seconds", type=float, default=None, help="simulated seconds per run")
    parser.add_argument(
        "--clock-offset",
        type=_duration,
        default=None,
        help="receiver clock offset, e.g. 3.7s; write negative values as --clock-offset=-10s",
    )
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    parser.add_argument("--out", default=None, help=f"output directory (default ${ENV_OUT_DIR} or ./{DEFAULT_OUT_DIR})")
    parser.add_argument("--per-run", action="store_true", help="also write each run's mean occupancy to runs.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpsched", description="Multipath TCP packet scheduler simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="warnings only")
    commands = parser.add_subparsers(dest="command", metavar="{run,compare,presets}")

    run = commands.add_parser("run", help="run one scheduler on a scenario")
    _add_common(run)
    run.add_argument("--scheduler", choices=SCHEDULER_NAMES, default=None, help="scheduler (default from scenario)")

    cmp = commands.add_parser("compare", help="run every scheduler on a scenario")
    _add_common(cmp)

    commands.add_parser("presets", help="list built-in scenarios")
    return parser


def _configure(args: argparse.Namespace) -> ScenarioConfig:
    cfg = load_scenario(args.scenario)
    return cfg.with_overrides(
        scheduler=getattr(args, "scheduler", None),
        base_seed=args.seed,
        runs=args.runs,
        sim_seconds=args.sim_seconds,
        clock_offset_dT=args.clock_offset,
    )


def _out_dir(args: argparse.Namespace) -> str:
    return args.out or os.environ.get(ENV_OUT_DIR) or DEFAULT_OUT_DIR


def _list_presets() -> None:
    for name in PRESETS:
        print(describe(preset(name)))  # noqa: T201


def main(argv: Sequence[str] | None = None) -> int:
    """
    Entry point of the ``mpsched`` command.

    Args:
    ----
        argv (Sequence[str] | None): [Optional] arguments, defaults to ``sys.argv[1:]``

    Returns:
    -------
        status: 0 on success, 1 on invalid input, 2 when a run or the output fails

    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose - args.quiet)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    if args.command == "presets":
        _list_presets()
        return EXIT_OK
    if args.workers < 1:
        logger.error("--workers must be at least 1")
        return EXIT_INVALID

    try:
        cfg = _configure(args)
        batches = [run_batch(cfg, args.workers)] if args.command == "run" else compare(cfg, SCHEDULER_NAMES, args.workers)
        written = emit_outputs(batches, _out_dir(args), per_run=args.per_run)
    except ScenarioError as err:
        logger.error("{}", err)
        return EXIT_INVALID
    except MpschedError as err:
        logger.error("{}", err)
        return EXIT_FAILED
    for batch in batches:
        mean, std = batch.occupancy
        logger.info("{} / {}: mean occupancy {:.2f} ± {:.2f} MSS", batch.scenario, batch.scheduler, mean, std)
    logger.debug("Wrote {}", ", ".join(str(path) for path in written))
    return EXIT_OK
