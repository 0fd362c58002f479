"""
Result Files

CSV tables and JSON documents written by the commands.

Reals are written with 17 significant digits and '.' as the decimal
separator; infinities appear as the sentinels "-inf" and "+inf".
"""

import csv
import hashlib
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel

from src import __version__
from src.models.reports import EntropyScan, ScanReport
from src.models.values import ExtendedReal

logger = structlog.get_logger(__name__)

SCAN_COLUMNS = ("scan_var", "value", "stat", "stat_err", "mode")
ENTROPY_COLUMNS = ("L", "eps", "n_points", "logdet_per_site", "entropy_per_site", "szego_ref")


def format_real(value: Any) -> str:
    """Text form of one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, ExtendedReal):
        return str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(value)


def write_rows_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write rows under a fixed header."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_real(row.get(k)) for k in fieldnames})
            count += 1
    logger.debug("CSV written", path=str(path), rows=count)
    return path


def scan_rows(report: ScanReport) -> list[dict[str, Any]]:
    """
    Rows of a scan in grid order, statistics in the order they were recorded.

    scan_var holds the grid value, value the statistic named in stat.
    """
    order = {v: i for i, v in enumerate(report.grid)}
    points = sorted(enumerate(report.points), key=lambda item: (order[item[1].value], item[0]))
    return [
        {
            "scan_var": p.value,
            "value": p.stat_value,
            "stat": p.stat,
            "stat_err": p.stat_err,
            "mode": p.mode,
        }
        for _, p in points
    ]


def write_scan_csv(report: ScanReport, path: Path) -> Path:
    return write_rows_csv(path, SCAN_COLUMNS, scan_rows(report))


def write_entropy_csv(scan: EntropyScan, path: Path) -> Path:
    rows = [
        {
            "L": cell.L,
            "eps": cell.eps,
            "n_points": cell.n_points,
            "logdet_per_site": cell.logdet_per_site,
            "entropy_per_site": cell.entropy_per_site,
            "szego_ref": cell.szego_ref,
        }
        for cell in sorted(scan.cells, key=lambda c: (c.L, -c.eps))
    ]
    return write_rows_csv(path, ENTROPY_COLUMNS, rows)


class ResultEncoder(json.JSONEncoder):
    """JSON encoder for numpy values, pydantic models and sentinels."""

    def default(self, obj: Any) -> Any:
        if isinstance(obj, ExtendedReal):
            return obj.value if obj.is_finite else obj.kind.value
        if isinstance(obj, BaseModel):
            return {name: getattr(obj, name) for name in type(obj).model_fields}
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, (Path, Enum)):
            return obj.value if isinstance(obj, Enum) else str(obj)
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        return super().default(obj)


def _finite_floats(obj: Any) -> Any:
    """Replace float infinities so the JSON stays strict."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_real(obj)
    if isinstance(obj, dict):
        return {k: _finite_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_floats(v) for v in obj]
    return obj


def to_json(payload: Any) -> str:
    # Round trip through the encoder first so nested models become plain data.
    plain = json.loads(json.dumps(payload, cls=ResultEncoder))
    return json.dumps(_finite_floats(plain), indent=2, sort_keys=True, allow_nan=False)


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(payload) + "\n", encoding="utf-8")
    return path


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a config."""
    canonical = json.dumps(config, cls=ResultEncoder, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_manifest(
    directory: Path,
    config: Mapping[str, Any],
    outputs: Sequence[Path],
    wall_time: float,
    errors: Mapping[str, Any] | None = None,
    extra: Mapping[str, Any] | None = None,
    name: str = "manifest.json",
) -> Path:
    """
    Run manifest: config echo and hash, tool version, wall time, outputs and error summary.

    Everything a CSV holds can be recomputed from the echoed config.
    """
    manifest = {
        "tool": "spectralfield",
        "version": __version__,
        "config": dict(config),
        "config_sha256": config_hash(config),
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "wall_time_seconds": wall_time,
        "outputs": [p.name for p in outputs],
        "errors": dict(errors or {}),
    }
    if extra:
        manifest.update(extra)
    path = write_json(directory / name, manifest)
    logger.info("Manifest written", path=str(path), outputs=len(outputs))
    return path
