"""
Command: sample

Draw Gaussian fields on the torus, optionally transformed, and tabulate
per-field summaries. With output.dump_fields every field is also written
as an SPF1 dump.
"""

from functools import partial
from pathlib import Path

import numpy as np
import structlog
from scipy import stats

from src.engine.sampler import sample_statistics
from src.models.errors import UsageError
from src.models.experiment import ExperimentConfig, ToolOutcome
from src.models.field import FieldSample
from src.models.spectrum import StructureFunction
from src.storage.field_dump import write_field_dump
from src.storage.results import write_rows_csv
from src.tools.base import command_schema, output_file

logger = structlog.get_logger(__name__)

COLUMNS = ("stream", "mean", "variance", "kurtosis", "lag1")


def _describe(dump_dir: Path | None, prefix: str, field: FieldSample) -> dict[str, float | int]:
    x = field.array
    if dump_dir is not None:
        write_field_dump(field, dump_dir / f"{prefix}field_{field.stream:06d}.spf1")
    lag1 = float(np.mean(x * np.roll(x, 1, axis=0)))
    return {
        "stream": field.stream,
        "mean": float(x.mean()),
        "variance": float(x.var()),
        "kurtosis": float(stats.kurtosis(x.ravel(), fisher=False)),
        "lag1": lag1,
    }


def run_sample(
    config: ExperimentConfig,
    structure: StructureFunction,
    directory: Path,
    workers: int | None = None,
) -> ToolOutcome:
    """
    Sample config.samples fields on a torus of side config.torus_side.

    Returns:
        ToolOutcome listing the summary CSV and any dumps
    """
    if config.torus_side is None:
        raise UsageError("sample needs torus_side")
    assert config.seed is not None
    dump_dir = directory if config.output.dump_fields else None
    rows = sample_statistics(
        structure,
        config.torus_side,
        config.seed,
        config.samples,
        partial(_describe, dump_dir, config.output.prefix),
        transform=config.transform,
        workers=workers,
    )
    path = write_rows_csv(output_file(config, directory, "samples.csv"), COLUMNS, rows)
    outputs = [path]
    if dump_dir is not None:
        outputs.extend(
            output_file(config, directory, f"field_{row['stream']:06d}.spf1") for row in rows
        )
    kurtosis = np.array([row["kurtosis"] for row in rows])
    summary = {"mean_kurtosis": float(kurtosis.mean())}
    errors = {}
    if len(rows) > 1:
        errors["mean_kurtosis"] = float(kurtosis.std(ddof=1) / np.sqrt(len(rows)))
    logger.info("Fields sampled", count=len(rows), side=config.torus_side, transform=config.transform.value)
    return ToolOutcome(outputs=outputs, errors=errors, summary=summary)


SAMPLE_SPEC = command_schema(
    "sample",
    "Sample Gaussian fields with a target structure function on the discrete torus.",
    {
        "seed": {"type": "integer", "minimum": 0, "description": "Master seed"},
        "torus_side": {"type": "integer", "minimum": 8, "multipleOf": 2, "description": "Torus side N"},
        "samples": {"type": "integer", "minimum": 1, "default": 1},
        "transform": {"type": "string", "enum": ["none", "sign", "cube"], "default": "none"},
    },
    ["seed", "torus_side"],
)
