"""
Field Sample Model

One real-valued realization on the discrete torus (Z/NZ)^d.
"""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class TransformKind(str, Enum):
    """Pointwise transform applied after synthesis."""
    NONE = "none"
    SIGN = "sign"
    CUBE = "cube"


class FieldSample(BaseModel):
    """A sampled field with its provenance."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=1, description="Lattice dimension d")
    side: int = Field(..., ge=2, description="Torus side N")
    values: Any = Field(..., description="ndarray of shape (N,)*d")
    seed: int = Field(..., ge=0, lt=2**64, description="Master seed")
    stream: int = Field(default=0, ge=0, description="Sample index within the master seed")
    structure_id: str = Field(..., description="Identifier of the structure function")
    transform: TransformKind = Field(default=TransformKind.NONE, description="Applied transform")

    @model_validator(mode="after")
    def check_values(self) -> "FieldSample":
        values = np.asarray(self.values)
        if values.shape != (self.side,) * self.dimension:
            raise ValueError(f"field shape {values.shape} does not match side/dimension")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values)

    @property
    def provenance(self) -> tuple[str, int, int, TransformKind]:
        return (self.structure_id, self.side, self.dimension, self.transform)
