"""
Tabulated Grid Files

Plain text: a header line "d N", then N^d whitespace-separated
nonnegative reals in row-major order.
"""

from pathlib import Path

import numpy as np
import structlog

from src.models.errors import InputValidationError

logger = structlog.get_logger(__name__)


def load_tabulated_grid(path: Path) -> tuple[int, int, tuple[float, ...]]:
    """
    Read a grid file.

    Returns:
        (d, N, row-major values)

    Raises:
        InputValidationError: Malformed header, wrong value count, negative or non-finite values
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputValidationError(f"cannot read grid file {path}: {e}") from e
    header, _, body = text.strip().partition("\n")
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise InputValidationError(f"grid file header must be 'd N', got {header!r}")
    d, n = int(parts[0]), int(parts[1])
    if d < 1 or n < 2:
        raise InputValidationError("grid file needs d >= 1 and N >= 2")
    try:
        values = np.array(body.split(), dtype=float)
    except ValueError as e:
        raise InputValidationError(f"grid file {path} holds a non-numeric value") from e
    if values.size != n**d:
        raise InputValidationError(f"grid file holds {values.size} values, expected {n**d}")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise InputValidationError("grid values must be finite and nonnegative")
    logger.debug("Grid loaded", path=str(path), dimension=d, size=n)
    return d, n, tuple(float(v) for v in values)


def write_tabulated_grid(path: Path, dimension: int, values: np.ndarray) -> Path:
    grid = np.asarray(values, dtype=float)
    n = grid.shape[0]
    if grid.shape != (n,) * dimension:
        raise InputValidationError("grid must have shape (N,)*d")
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{dimension} {n}"] + [format(float(v), ".17g") for v in grid.ravel()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
