"""
Field Dumps

SPF1 binary format, little-endian: magic "SPF1", u32 d, u32 N, u64 seed,
then N^d float64 values in row-major order.
"""

import struct
from pathlib import Path

import numpy as np
import structlog

from src.models.errors import InputValidationError
from src.models.field import FieldSample

logger = structlog.get_logger(__name__)

MAGIC = b"SPF1"
HEADER = struct.Struct("<4sIIQ")


def write_field_dump(field: FieldSample, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(HEADER.pack(MAGIC, field.dimension, field.side, field.seed))
        handle.write(np.ascontiguousarray(field.array, dtype="<f8").tobytes())
    logger.debug("Field dumped", path=str(path), side=field.side, stream=field.stream)
    return path


def read_field_dump(path: Path, structure_id: str = "unknown") -> FieldSample:
    """
    Load an SPF1 dump.

    The format does not carry the stream index or the structure function,
    so the sample comes back with stream 0 and the given identifier.

    Raises:
        InputValidationError: Wrong magic or a truncated payload
    """
    data = path.read_bytes()
    if len(data) < HEADER.size:
        raise InputValidationError(f"{path} is too short for an SPF1 header")
    magic, d, n, seed = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InputValidationError(f"{path} is not an SPF1 file")
    count = n**d
    payload = data[HEADER.size:]
    if len(payload) != 8 * count:
        raise InputValidationError(f"{path} holds {len(payload)} payload bytes, expected {8 * count}")
    values = np.frombuffer(payload, dtype="<f8").astype(float).reshape((n,) * d)
    return FieldSample(dimension=d, side=n, values=values, seed=seed, structure_id=structure_id)
