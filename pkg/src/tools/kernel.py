"""
Command: kernel

Tabulate the covariance kernel K(j) for ‖j‖_∞ ≤ radius, together with the
σ² limits and gap fraction of the structure function.
"""

from pathlib import Path

import structlog

from src.engine.spectral_models import covariance_kernel, gap_fraction, sigma_sq_d, sigma_sq_limit
from src.models.domain import IndicatorMode
from src.models.experiment import ExperimentConfig, ToolOutcome
from src.models.spectrum import StructureFunction
from src.storage.results import write_rows_csv
from src.tools.base import command_schema, output_file

logger = structlog.get_logger(__name__)

COLUMNS = ("lag", "value")


def run_kernel(
    config: ExperimentConfig,
    structure: StructureFunction,
    directory: Path,
    workers: int | None = None,
) -> ToolOutcome:
    kernel = covariance_kernel(structure, config.radius)
    values = kernel.table.ravel()
    rows = [
        {"lag": " ".join(str(int(k)) for k in lag), "value": float(v)}
        for lag, v in zip(kernel.lag_vectors(), values)
    ]
    path = write_rows_csv(output_file(config, directory, "kernel.csv"), COLUMNS, rows)
    summary = {
        "method": kernel.method,
        "sigma_sq_d": sigma_sq_d(structure),
        "sigma_sq_limit": sigma_sq_limit(structure, config.mode),
        "gap_fraction": gap_fraction(structure),
        "normalization": structure.normalization,
    }
    logger.info("Kernel tabulated", radius=config.radius, method=kernel.method, converged=kernel.converged)
    return ToolOutcome(
        outputs=[path],
        errors={"kernel": kernel.error_estimate, "normalization": structure.normalization_error},
        converged=kernel.converged,
        summary=summary,
    )


KERNEL_SPEC = command_schema(
    "kernel",
    "Tabulate the covariance kernel of a structure function on a cubic lag window.",
    {
        "radius": {"type": "integer", "minimum": 0, "default": 8, "description": "Lag window radius R"},
        "mode": {"type": "string", "enum": [m.value for m in IndicatorMode], "default": "lattice"},
    },
    [],
)
