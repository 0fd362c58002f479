"""
Command: covariance-grid

Covariances of a box at offset 0 with boxes at a list of offsets, with
the predicted limits (-1)^j σ²/2^j and the ratio to them.
"""

from itertools import product
from pathlib import Path

import structlog

from src.engine.fluctuations import covariance_grid
from src.models.domain import IndicatorMode
from src.models.errors import UsageError
from src.models.experiment import ExperimentConfig, ToolOutcome
from src.models.spectrum import StructureFunction
from src.storage.results import write_rows_csv
from src.tools.base import GEOMETRY_SCHEMA, command_schema, output_file

logger = structlog.get_logger(__name__)

COLUMNS = ("n", "value", "predicted_limit", "ratio")


def grid_offsets(config: ExperimentConfig) -> list[tuple[int, ...]]:
    """Explicit offsets, or every offset in {0..offset_max}^d."""
    d = config.structure.dimension
    geometry = config.geometry
    if geometry.offsets is not None:
        if any(len(n) != d for n in geometry.offsets):
            raise UsageError(f"every offset needs {d} components")
        return [tuple(n) for n in geometry.offsets]
    if geometry.offset_max is not None:
        return list(product(range(geometry.offset_max + 1), repeat=d))
    raise UsageError("covariance-grid needs geometry.offsets or geometry.offset_max")


def run_covariance_grid(
    config: ExperimentConfig,
    structure: StructureFunction,
    directory: Path,
    workers: int | None = None,
) -> ToolOutcome:
    if config.geometry.L is None:
        raise UsageError("covariance-grid needs geometry.L")
    offsets = grid_offsets(config)
    rows = covariance_grid(
        structure, config.geometry.L, offsets, config.mode, config.covariance_method, workers
    )
    table = [
        {
            "n": " ".join(str(k) for k in row.offset),
            "value": row.value,
            "predicted_limit": row.predicted_limit,
            "ratio": row.ratio,
        }
        for row in rows
    ]
    path = write_rows_csv(output_file(config, directory, "covariance_grid.csv"), COLUMNS, table)
    logger.info("Covariance grid written", L=config.geometry.L, offsets=len(offsets))
    return ToolOutcome(
        outputs=[path],
        errors={" ".join(str(k) for k in row.offset): row.error for row in rows},
        converged=all(row.converged for row in rows),
    )


COVARIANCE_GRID_SPEC = command_schema(
    "covariance-grid",
    "Covariances of adjacent and disjoint boxes against their predicted limits.",
    {
        "geometry": GEOMETRY_SCHEMA,
        "mode": {"type": "string", "enum": [m.value for m in IndicatorMode], "default": "lattice"},
        "covariance_method": {"type": "string", "enum": ["spectral", "direct"], "default": "spectral"},
    },
    ["geometry"],
)
