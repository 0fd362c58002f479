"""
Extended Real Values

Tagged values for quantities that may legitimately be infinite, such as
the variance limit of a non-hyperuniform model or the log-determinant of
a singular covariance matrix. Reports never carry raw float infinities.
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ExtendedKind(str, Enum):
    """Which part of the extended real line a value lives on."""
    FINITE = "finite"
    NEG_INF = "-inf"
    POS_INF = "+inf"


class ExtendedReal(BaseModel):
    """A real number or one of the two infinity sentinels."""

    model_config = ConfigDict(frozen=True)

    kind: ExtendedKind = Field(..., description="Finite value or infinity sentinel")
    value: float | None = Field(default=None, description="The value when finite")
    converged: bool = Field(
        default=True,
        description="False when the value is a best estimate from unconverged quadrature",
    )

    @model_validator(mode="after")
    def check_payload(self) -> "ExtendedReal":
        if self.kind == ExtendedKind.FINITE:
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("finite ExtendedReal needs a finite value")
        elif self.value is not None:
            raise ValueError("infinity sentinels carry no value")
        return self

    @classmethod
    def finite(cls, value: float, converged: bool = True) -> "ExtendedReal":
        return cls(kind=ExtendedKind.FINITE, value=float(value), converged=converged)

    @classmethod
    def neg_inf(cls) -> "ExtendedReal":
        return cls(kind=ExtendedKind.NEG_INF)

    @classmethod
    def pos_inf(cls) -> "ExtendedReal":
        return cls(kind=ExtendedKind.POS_INF)

    @property
    def is_finite(self) -> bool:
        return self.kind == ExtendedKind.FINITE

    def to_float(self) -> float:
        """Float view for internal arithmetic (infinities become IEEE infinities)."""
        if self.kind == ExtendedKind.NEG_INF:
            return -math.inf
        if self.kind == ExtendedKind.POS_INF:
            return math.inf
        assert self.value is not None
        return self.value

    def __str__(self) -> str:
        if self.kind == ExtendedKind.FINITE:
            return format(self.value, ".17g")
        return self.kind.value
