#!/usr/bin/env python3
"""
jetcurv - Jet-bundle curvature toolkit

Command-line driver: runs the identity suite over a model catalog, the
randomized linear-algebra trials, or tabulates jet-bundle curvature.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from commands.curvature_table import curvature_command
from commands.run import run_command
from commands.verify_identities import verify_identities_command
from errors import ConfigError, InternalInconsistency, JetCurvError
from report import ReportWriter
from runconfig import DEFAULT_TOLERANCES, GridSpec, RunConfig

# Load environment variables from .env file
load_dotenv()

logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=logging.INFO
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 1
EXIT_BAD_INPUT = 2


def parse_tolerance(text: str) -> tuple[str, float]:
    """NAME=VALUE for --tolerance"""
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name} is not a number: {value!r}")
    if number < 0:
        raise argparse.ArgumentTypeError(f"tolerance {name} must be nonnegative")
    return name, number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetcurv", description="Jet-bundle curvature and identity checks")
    parser.add_argument("--output", type=Path, help="output directory (overrides JETCURV_OUTPUT_DIR)")
    parser.add_argument("--tolerance", type=parse_tolerance, action="append", default=[], metavar="NAME=VALUE")
    parser.add_argument("--workers", type=int, help="parallel model workers (overrides JETCURV_WORKERS)")
    parser.add_argument("--log-level", help="logging level (overrides JETCURV_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the identity suite described by a configuration file")
    run.add_argument("config", type=Path)

    verify = sub.add_parser("verify-identities", help="randomized linear-algebra identity trials")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--trials", type=int, default=1000)

    table = sub.add_parser("curvature", help="tabulate the curvature of J_k for one model")
    table.add_argument("model_id")
    table.add_argument("--catalog", type=Path, default=Path("catalog.json"))
    table.add_argument("--k", type=int, default=1)
    table.add_argument("--grid", choices=["polar", "cartesian"], default="polar")
    table.add_argument("--radius", type=float, default=0.5)
    table.add_argument("--points", type=int, default=64)
    table.add_argument("--rings", type=int)
    return parser


class JetCurvApp:
    """Command-line application state"""

    def __init__(self):
        self.output_dir: Optional[Path] = None
        self.workers: Optional[int] = None
        self.tolerances: dict[str, float] = {}

    def load_config(self, args: argparse.Namespace):
        """Load configuration from environment variables, then command-line overrides"""
        level = (args.log_level or os.getenv('JETCURV_LOG_LEVEL') or 'INFO').upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigError(f"unknown log level {level!r}")
        logging.getLogger().setLevel(level)

        env_output = os.getenv('JETCURV_OUTPUT_DIR')
        self.output_dir = args.output or (Path(env_output) if env_output else None)

        env_workers = os.getenv('JETCURV_WORKERS')
        try:
            self.workers = args.workers or (int(env_workers) if env_workers else None)
        except ValueError:
            raise ConfigError(f"JETCURV_WORKERS must be an integer, got {env_workers!r}")

        self.tolerances = dict(args.tolerance)
        unknown = sorted(set(self.tolerances) - set(DEFAULT_TOLERANCES))
        if unknown:
            logger.warning(f"Tolerance overrides for unknown identities: {unknown}")
        logger.info("Configuration loaded successfully")

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES.get(name, 1e-8))

    def run(self, args: argparse.Namespace) -> int:
        config = RunConfig.from_file(args.config)
        config.tolerances.update(self.tolerances)
        if self.workers:
            config.workers = self.workers
        writer = ReportWriter(self.output_dir or config.outputs)
        report = run_command(config, writer)
        return EXIT_OK if report.passed else EXIT_IDENTITY_FAILURE

    def verify_identities(self, args: argparse.Namespace) -> int:
        if args.trials < 1:
            raise ConfigError(f"trials must be positive, got {args.trials}")
        writer = ReportWriter(self.output_dir or Path("reports"))
        report = verify_identities_command(args.seed, args.trials, writer, self.tolerance)
        return EXIT_OK if report.passed else EXIT_IDENTITY_FAILURE

    def curvature(self, args: argparse.Namespace) -> int:
        grid = GridSpec(shape=args.grid, radius=args.radius, points=args.points, margin=0.0, rings=args.rings)
        writer = ReportWriter(self.output_dir or Path("reports"))
        path = curvature_command(args.catalog, args.model_id, args.k, grid, writer)
        logger.info(f"Curvature table: {path}")
        return EXIT_OK

    def dispatch(self, args: argparse.Namespace) -> int:
        handlers = {
            "run": self.run,
            "verify-identities": self.verify_identities,
            "curvature": self.curvature,
        }
        return handlers[args.command](args)


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    app = JetCurvApp()

    try:
        app.load_config(args)
        return app.dispatch(args)
    except InternalInconsistency as e:
        logger.error(f"Identity check failed: {e}", exc_info=True)
        return EXIT_IDENTITY_FAILURE
    except JetCurvError as e:
        logger.error(f"Cannot run: {e}")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
