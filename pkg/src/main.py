"""
spectralfield command line

Batch runner: one JSON config per run, CSV/JSON results plus a manifest
in the output directory.

Exit status: 0 success, 2 invalid config or input, 3 numeric failure or
unconverged statistic, 4 resource budget exceeded, 1 unexpected error.
"""

import argparse
import json
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import structlog
from pydantic import ValidationError

from src import __version__
from src.config import Settings, get_settings
from src.engine.spectral_models import make_structure_function
from src.models.errors import (
    DegenerateInputError,
    DomainError,
    GeometryError,
    InputValidationError,
    NumericError,
    UsageError,
)
from src.models.experiment import CommandName, ExperimentConfig
from src.models.spectrum import StructureFamily, StructureFunction
from src.storage.grids import load_tabulated_grid
from src.storage.results import write_manifest
from src.tools import COMMANDS, TOOL_SPECS

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4

_INVALID = (
    ValidationError,
    InputValidationError,
    UsageError,
    DomainError,
    GeometryError,
    DegenerateInputError,
)

logger = structlog.get_logger(__name__)


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    """Configure structlog on top of stdlib logging (stderr)."""
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level)
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level, force=True)
    renderer = (
        structlog.processors.JSONRenderer()
        if settings.log_format == "json"
        else structlog.dev.ConsoleRenderer()
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralfield",
        description="Local-mass fluctuations, CLT diagnostics and entropy of stationary lattice fields.",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="Experiment config (JSON)")
    source.add_argument(
        "--schema",
        choices=[c.value for c in CommandName],
        help="Print the config schema of a command and exit",
    )
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--workers", type=int, default=None, help="Parallel workers (0 = all cores)")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


# =============================================================================
# Config loading
# =============================================================================

def format_validation_error(error: ValidationError) -> str:
    """One line per problem, each prefixed with its path in the config."""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def load_config(path: Path, settings: Settings | None = None) -> ExperimentConfig:
    """
    Read and validate a config file.

    The SPECTRALFIELD_SEED override replaces the file's seed, and a
    tabulated structure reads its grid file (relative to the config) before
    validation.

    Raises:
        UsageError: Unreadable file, malformed JSON or an unknown command
        ValidationError: Schema violations
        InputValidationError: Malformed grid file
    """
    settings = settings or get_settings()
    try:
        raw: Any = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")

    commands = [c.value for c in CommandName]
    if raw.get("command") not in commands:
        raise UsageError(f"unknown command {raw.get('command')!r}; expected one of {', '.join(commands)}")

    if settings.seed is not None:
        raw["seed"] = settings.seed

    structure = raw.get("structure")
    if isinstance(structure, dict) and structure.get("family") == StructureFamily.TABULATED.value:
        grid_file = raw.get("grid_file")
        if grid_file and "table" not in structure:
            grid_path = Path(grid_file)
            if not grid_path.is_absolute():
                grid_path = path.parent / grid_path
            d, n, values = load_tabulated_grid(grid_path)
            if structure.get("dimension", d) != d:
                raise InputValidationError(
                    f"grid file dimension {d} differs from structure.dimension {structure['dimension']}"
                )
            raw["structure"] = structure | {"dimension": d, "table_size": n, "table": list(values)}
    return ExperimentConfig.model_validate(raw)


def build_structure(config: ExperimentConfig) -> StructureFunction:
    return make_structure_function(config.structure)


# =============================================================================
# Running
# =============================================================================

def exit_status(error: BaseException) -> int:
    """Exit status of a failed run."""
    if isinstance(error, _INVALID):
        return EXIT_INVALID
    if isinstance(error, NumericError):
        return EXIT_NUMERIC
    if isinstance(error, MemoryError):
        return EXIT_RESOURCE
    return EXIT_UNEXPECTED


def _describe_error(error: BaseException) -> str:
    if isinstance(error, ValidationError):
        return format_validation_error(error)
    return str(error)


def run(config: ExperimentConfig, directory: Path, workers: int | None = None) -> int:
    """
    Execute one experiment and write its outputs and manifest.

    Returns:
        Exit status (0, 2, 3, 4, or 1 for unexpected errors)
    """
    started = time.perf_counter()
    echo = config.model_dump(mode="json")
    directory.mkdir(parents=True, exist_ok=True)
    log = logger.bind(command=config.command.value)
    log.info("Run started", directory=str(directory), workers=workers)
    try:
        structure = build_structure(config)
        outcome = COMMANDS[config.command](config, structure, directory, workers)
    except Exception as e:
        status = exit_status(e)
        if status == EXIT_UNEXPECTED:
            log.exception("Run failed unexpectedly")
        else:
            log.error("Run failed", error=_describe_error(e), kind=type(e).__name__, status=status)
        write_manifest(
            directory,
            echo,
            [],
            time.perf_counter() - started,
            errors={"failure": _describe_error(e), "kind": type(e).__name__},
            extra={"status": status},
        )
        return status

    status = EXIT_OK if outcome.converged else EXIT_NUMERIC
    write_manifest(
        directory,
        echo,
        outcome.outputs,
        time.perf_counter() - started,
        errors=outcome.errors,
        extra={"status": status, "summary": outcome.summary, "structure": structure.identifier},
    )
    if status == EXIT_NUMERIC:
        log.warning("Run finished with unconverged statistics")
    else:
        log.info("Run finished", outputs=len(outcome.outputs))
    return status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"invalid environment: {format_validation_error(e)}", file=sys.stderr)
        return EXIT_INVALID
    configure_logging(settings, args.verbose)

    if args.schema is not None:
        print(json.dumps(TOOL_SPECS[CommandName(args.schema)], indent=2))
        return EXIT_OK

    try:
        config = load_config(args.config, settings)
    except Exception as e:
        status = exit_status(e)
        if status == EXIT_UNEXPECTED:
            logger.exception("Config loading failed unexpectedly")
        else:
            logger.error("Invalid config", path=str(args.config), error=_describe_error(e))
            print(f"error: {_describe_error(e)}", file=sys.stderr)
        return status

    workers = args.workers if args.workers is not None else settings.workers
    n_jobs = -1 if workers == 0 else workers
    directory = args.out or config.output.directory or Path("results") / config.command.value
    return run(config, directory, n_jobs)


if __name__ == "__main__":
    sys.exit(main())
