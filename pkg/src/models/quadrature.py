"""
Quadrature Models

Descriptors for integrals over the frequency torus [-π, π]^d.
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Slack allowed when checking that boxes lie inside the torus.
_EDGE_SLACK = 1e-12


class BoxRole(str, Enum):
    """
    How an axis-aligned box takes part in an integration.

    - SINGULAR: the integrand may blow up on the box; cells touching it are
      refined dyadically and non-finite samples inside it are dropped
    - EXCLUDED: the box is removed from the integration region
    - INTERFACE: the integrand jumps across the box faces; panels are cut
      along them so no cell straddles a discontinuity
    """
    SINGULAR = "singular"
    EXCLUDED = "excluded"
    INTERFACE = "interface"


class RegionBox(BaseModel):
    """Closed axis-aligned box in [-π, π]^d."""

    model_config = ConfigDict(frozen=True)

    lo: tuple[float, ...] = Field(..., description="Lower corner")
    hi: tuple[float, ...] = Field(..., description="Upper corner")
    role: BoxRole = Field(default=BoxRole.SINGULAR, description="Role in the integration")

    @model_validator(mode="after")
    def check_corners(self) -> "RegionBox":
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("box corners must have the same positive length")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError("box lower corner exceeds upper corner")
            if a < -math.pi - _EDGE_SLACK or b > math.pi + _EDGE_SLACK:
                raise ValueError("box must lie inside [-pi, pi]^d")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @classmethod
    def point(cls, coords: tuple[float, ...], role: BoxRole = BoxRole.SINGULAR) -> "RegionBox":
        return cls(lo=coords, hi=coords, role=role)

    @classmethod
    def slab(
        cls,
        dimension: int,
        axis: int,
        lo: float,
        hi: float,
        role: BoxRole = BoxRole.SINGULAR,
    ) -> "RegionBox":
        """Box that is [lo, hi] along one axis and the full circle along the others."""
        low = [-math.pi] * dimension
        high = [math.pi] * dimension
        low[axis], high[axis] = lo, hi
        return cls(lo=tuple(low), hi=tuple(high), role=role)


class QuadratureSpec(BaseModel):
    """Parameters of a torus integration."""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(..., ge=1, description="Dimension d of the torus")
    resolution: int = Field(
        default=16, ge=2, description="Base midpoint cells per axis over the full circle"
    )
    tolerance: float = Field(default=1e-10, gt=0, description="Relative error target")
    max_depth: int = Field(default=40, ge=0, description="Dyadic refinement depth near singular boxes")
    max_levels: int = Field(default=7, ge=1, description="Number of resolution doublings")
    boxes: tuple[RegionBox, ...] = Field(default=(), description="Singular, excluded and interface boxes")
    region: RegionBox | None = Field(default=None, description="Sub-region to integrate over")
    error_exponents: tuple[float, ...] = Field(
        default=(2.0, 4.0, 6.0), description="Powers of the cell width removed by extrapolation"
    )

    @model_validator(mode="after")
    def check_dimensions(self) -> "QuadratureSpec":
        for box in self.boxes:
            if box.dimension != self.dimension:
                raise ValueError("region box dimension does not match the quadrature dimension")
        if self.region is not None and self.region.dimension != self.dimension:
            raise ValueError("integration region dimension does not match the quadrature dimension")
        if any(p <= 0 for p in self.error_exponents):
            raise ValueError("error exponents must be positive")
        return self

    def boxes_with_role(self, role: BoxRole) -> list[RegionBox]:
        return [box for box in self.boxes if box.role == role]


class QuadratureResult(BaseModel):
    """Outcome of a numerical integration."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Best estimate of the integral")
    error_estimate: float = Field(..., ge=0, description="Estimated absolute error")
    converged: bool = Field(..., description="Whether the tolerance was met")
    evaluations: int = Field(default=0, ge=0, description="Integrand samples used")

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
            converged=self.converged,
            evaluations=self.evaluations,
        )

    def combine(self, other: "QuadratureResult", sign: float = 1.0) -> "QuadratureResult":
        """Sum (or difference) of two independent integrals."""
        return QuadratureResult(
            value=self.value + sign * other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            converged=self.converged and other.converged,
            evaluations=self.evaluations + other.evaluations,
        )
