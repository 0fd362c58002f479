"""
Command: clt

Normality diagnostic of ball masses across sampled fields: k3 and k4
with jackknife errors and the Kolmogorov-Smirnov distance to N(0, 1).
"""

from pathlib import Path

import structlog

from src.engine.moments import clt_scan
from src.models.experiment import ExperimentConfig, ToolOutcome
from src.models.spectrum import StructureFunction
from src.storage.results import write_json, write_scan_csv
from src.tools.base import GRIDS_SCHEMA, command_schema, output_file

logger = structlog.get_logger(__name__)


def run_clt(
    config: ExperimentConfig,
    structure: StructureFunction,
    directory: Path,
    workers: int | None = None,
) -> ToolOutcome:
    assert config.seed is not None
    report = clt_scan(
        structure,
        config.transform,
        config.grids.L,
        config.replicates,
        config.seed,
        side=config.torus_side,
        workers=workers,
    )
    csv_path = write_scan_csv(report, output_file(config, directory, "clt.csv"))
    json_path = write_json(output_file(config, directory, "clt.json"), report)
    errors = {f"{p.stat}@{p.value:g}": p.stat_err for p in report.points}
    logger.info("CLT scan written", points=len(report.points), hypothesis_met=report.hypothesis_met)
    return ToolOutcome(
        outputs=[csv_path, json_path],
        errors=errors,
        summary={"hypothesis_met": report.hypothesis_met},
    )


CLT_SPEC = command_schema(
    "clt",
    "Cumulant and Kolmogorov-Smirnov diagnostics of normalized ball masses (at least 1000 replicates).",
    {
        "seed": {"type": "integer", "minimum": 0},
        "grids": GRIDS_SCHEMA,
        "replicates": {"type": "integer", "minimum": 1000, "default": 1000},
        "transform": {"type": "string", "enum": ["none", "sign", "cube"], "default": "none"},
        "torus_side": {"type": "integer", "minimum": 8, "multipleOf": 2},
    },
    ["seed", "grids"],
)
