"""
Correlation Models

Correlation tables index block values by subsets of {1, ..., n}; a block
B maps to ρ_{|B|} evaluated at the points (i_b)_{b ∈ B}.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.errors import UsageError

MAX_ORDER = 6


class CorrelationTable(BaseModel):
    """Block values of an order-n correlation (or truncated correlation) table."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(..., ge=1, le=MAX_ORDER, description="Order n")
    points: tuple[tuple[int, ...], ...] | None = Field(
        default=None, description="Lattice points (i_1 ... i_n) the blocks refer to"
    )
    values: dict[frozenset[int], float] = Field(..., description="Value of each block")

    @model_validator(mode="after")
    def check_blocks(self) -> "CorrelationTable":
        universe = frozenset(range(1, self.order + 1))
        for block, value in self.values.items():
            if not block or not block <= universe:
                raise ValueError(f"block {sorted(block)} is not a nonempty subset of 1..{self.order}")
            if not math.isfinite(value):
                raise ValueError("table values must be finite")
        if self.points is not None and len(self.points) != self.order:
            raise ValueError("point list length must equal the order")
        return self

    def block(self, block: frozenset[int]) -> float:
        try:
            return self.values[block]
        except KeyError:
            raise UsageError(f"missing block value for {sorted(block)}") from None


class CumulantEstimate(BaseModel):
    """A k-statistic with its jackknife standard error."""

    order: int = Field(..., ge=1, le=4)
    value: float
    stderr: float = Field(..., ge=0)


class CumulantEstimates(BaseModel):
    """k_1 ... k_max from one sample."""

    n_samples: int = Field(..., ge=1)
    estimates: dict[int, CumulantEstimate]

    def __getitem__(self, order: int) -> CumulantEstimate:
        return self.estimates[order]
