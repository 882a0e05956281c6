"""Command-line front end: `python -m src.main <command> --config <path> --out <dir>`."""

import argparse
import asyncio
import sys
from pathlib import Path
from typing import Optional, Sequence

from .artifacts import RunDirectory
from ..models.errors import ConfigError, LiesymError
from ..utils.config import COMMANDS, ExperimentConfig, load_config
from ..utils.logging import get_logger, setup_logging
from ..viewmodels.discover_viewmodel import DiscoverViewModel
from ..viewmodels.enforce_viewmodel import EnforceViewModel
from ..viewmodels.fit_viewmodel import FitViewModel
from ..viewmodels.outcome import EXIT_CONFIG, EXIT_NUMERICAL, RunOutcome
from ..viewmodels.recovery_viewmodel import RecoveryViewModel
from ..viewmodels.spring_mass_viewmodel import SpringMassViewModel

VIEWMODELS = {
    "discover": DiscoverViewModel,
    "enforce": EnforceViewModel,
    "fit": FitViewModel,
    "exp-polyrec": RecoveryViewModel,
    "exp-springmass": SpringMassViewModel,
}

RUN_LOG = "run.log"

logger = get_logger("CLI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liesym",
        description="Enforce, discover and promote Lie group symmetries of dictionary models.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    parser.add_argument("--out", required=True, type=Path, help="directory that receives the run directory")
    return parser


def exit_code_for(error: LiesymError) -> int:
    """Arithmetic failures are numerical; everything else is bad input."""
    if isinstance(error, ArithmeticError) and not isinstance(error, ConfigError):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def write_outcome(run_dir: RunDirectory, outcome: RunOutcome) -> None:
    for name, body in outcome.documents.items():
        run_dir.write_json(name, body)
    for name, frame in outcome.tables.items():
        run_dir.write_csv(name, frame)
    for name, matrix in outcome.matrices.items():
        run_dir.write_matrix(name, matrix)


def execute(config: ExperimentConfig, out_dir: Path) -> int:
    run_dir = RunDirectory(out_dir, config)
    setup_logging(run_dir.path, RUN_LOG)
    logger.info(f"Running '{config.command}' into {run_dir.path}")

    viewmodel = VIEWMODELS[config.command](config)
    try:
        outcome = asyncio.run(viewmodel.run())
    except LiesymError as e:
        logger.error(f"'{config.command}' failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    finally:
        viewmodel.close()

    write_outcome(run_dir, outcome)
    print(run_dir.path)
    logger.info(f"'{config.command}' finished with exit code {outcome.exit_code}")
    return outcome.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if config.command != args.command:
            raise ConfigError(f"config is for '{config.command}', not '{args.command}'",
                              path=str(args.config))
    except ConfigError as e:
        logger.error(f"Rejected config: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(config, args.out)
