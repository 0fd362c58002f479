"""
Command: variance-scan

Variance of centered balls or cubes over a grid of scales and the fitted
growth exponent next to the model prediction.
"""

from pathlib import Path

import structlog

from src.engine.fluctuations import exponent_scan
from src.models.domain import IndicatorMode
from src.models.experiment import ExperimentConfig, ToolOutcome
from src.models.spectrum import StructureFunction
from src.storage.results import write_json, write_scan_csv
from src.tools.base import GEOMETRY_SCHEMA, GRIDS_SCHEMA, command_schema, output_file

logger = structlog.get_logger(__name__)


def run_variance_scan(
    config: ExperimentConfig,
    structure: StructureFunction,
    directory: Path,
    workers: int | None = None,
) -> ToolOutcome:
    report = exponent_scan(structure, config.geometry.shape, config.grids.L, config.mode, workers)
    csv_path = write_scan_csv(report, output_file(config, directory, "variance_scan.csv"))
    json_path = write_json(output_file(config, directory, "variance_scan.json"), report)
    assert report.fit is not None
    logger.info("Variance scan written", beta=report.fit.beta, points=len(report.points))
    return ToolOutcome(
        outputs=[csv_path, json_path],
        errors={"beta_stderr": report.fit.beta_stderr, "max_stat_err": max(p.stat_err for p in report.points)},
        converged=report.all_converged,
        summary={"fit": report.fit},
    )


VARIANCE_SCAN_SPEC = command_schema(
    "variance-scan",
    "Fit the growth exponent of local-mass variance over centered windows (at least five scales spanning a decade).",
    {
        "geometry": GEOMETRY_SCHEMA,
        "grids": GRIDS_SCHEMA,
        "mode": {"type": "string", "enum": [m.value for m in IndicatorMode], "default": "lattice"},
    },
    ["grids"],
)
