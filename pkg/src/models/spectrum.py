"""
Structure Function Models

A structure function S is a symmetric nonnegative spectral density on the
frequency torus [-π, π]^d. The covariance of the field is its inverse
Fourier transform, K(j) = (2π)^{-d} ∫ e^{-ij·θ} S(θ) dθ, and every model is
normalized to unit variance, K(0) = 1.

Families:
- CONSTANT: white noise, S ≡ 1
- STEALTHY_GAP: S = c outside a gap around the origin (interval in d = 1,
  Euclidean or sup-norm ball in d ≥ 2), 0 inside
- RADIAL_POWER: S = c·ρ(θ)^α with ρ the p-norm of (2 sin(θ_k/2))_k
- ANISOTROPIC_PRODUCT: S = c·Π_k |2 sin(θ_k/2)|^{α_k}
- AXES_STEALTHY: S = c outside the union of slabs {|θ_k| < δ}, 0 inside
- TABULATED: periodic multilinear interpolation of a grid of values
- COSINE_SERIES: S = 1 + Σ_m a_m cos(m·θ) over integer frequency vectors
"""

import math
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class StructureFamily(str, Enum):
    """Parametric families of structure functions."""
    CONSTANT = "constant"
    STEALTHY_GAP = "stealthy-gap"
    RADIAL_POWER = "radial-power"
    ANISOTROPIC_PRODUCT = "anisotropic-product"
    AXES_STEALTHY = "axes-stealthy"
    TABULATED = "tabulated"
    COSINE_SERIES = "cosine-series"


class GapNorm(str, Enum):
    """Norm defining the stealthy gap {‖θ‖ < δ}."""
    EUCLIDEAN = "euclidean"
    SUP = "sup"


class EnvelopeDirection(str, Enum):
    """Monotonicity of the spherical average of S near the origin."""
    INCREASING = "increasing"
    DECREASING = "decreasing"


class Envelope(BaseModel):
    """
    Declared regularity of S at the origin.

    The direction is trusted, not verified: it is the hypothesis under
    which the two-term Θ functional sandwiches the ball variance.
    """

    model_config = ConfigDict(frozen=True)

    direction: EnvelopeDirection = Field(..., description="Monotonicity direction near 0")
    radius: float = Field(default=math.pi, gt=0, description="Radius up to which it holds")


class CosineTerm(BaseModel):
    """One term a·cos(m·θ) of a cosine-series structure function."""

    model_config = ConfigDict(frozen=True)

    frequency: tuple[int, ...] = Field(..., description="Integer frequency vector m (nonzero)")
    amplitude: float = Field(..., description="Coefficient a")

    @model_validator(mode="after")
    def check_frequency(self) -> "CosineTerm":
        if not self.frequency or all(m == 0 for m in self.frequency):
            raise ValueError("cosine term frequency must be a nonzero vector")
        return self


class StructureFunctionSpec(BaseModel):
    """Family tag and parameters of a structure function."""

    model_config = ConfigDict(frozen=True)

    family: StructureFamily = Field(..., description="Parametric family")
    dimension: int = Field(default=1, ge=1, le=6, description="Lattice dimension d")
    delta: float | None = Field(
        default=None, gt=0, lt=math.pi, description="Gap radius (stealthy) or slab half-width (axes)"
    )
    gap_norm: GapNorm = Field(default=GapNorm.EUCLIDEAN, description="Norm of the stealthy gap")
    alpha: float | None = Field(default=None, ge=0, le=1, description="Radial-power exponent")
    p: float = Field(default=2.0, ge=1, description="Norm order of the radial-power family")
    alphas: tuple[float, ...] | None = Field(
        default=None, description="Per-axis exponents of the anisotropic family"
    )
    table: tuple[float, ...] | None = Field(
        default=None, description="Row-major grid values of the tabulated family"
    )
    table_size: int | None = Field(default=None, ge=2, description="Grid points N per axis")
    terms: tuple[CosineTerm, ...] | None = Field(default=None, description="Cosine-series terms")
    envelope: Envelope | None = Field(default=None, description="Declared regularity at the origin")
    assume_summable_truncated: bool = Field(
        default=False,
        description="Assumption flag: truncated correlations have uniformly summable sup-sums",
    )

    @model_validator(mode="after")
    def check_family_parameters(self) -> "StructureFunctionSpec":
        family = self.family
        d = self.dimension
        if family in (StructureFamily.STEALTHY_GAP, StructureFamily.AXES_STEALTHY):
            if self.delta is None:
                raise ValueError(f"{family.value} requires delta")
        if family == StructureFamily.RADIAL_POWER and self.alpha is None:
            raise ValueError("radial-power requires alpha")
        if family == StructureFamily.ANISOTROPIC_PRODUCT:
            if self.alphas is None or len(self.alphas) != d:
                raise ValueError("anisotropic-product requires one exponent per axis")
            if any(not 0.0 <= a <= 1.0 for a in self.alphas):
                raise ValueError("anisotropic exponents must lie in [0, 1]")
        if family == StructureFamily.TABULATED:
            if self.table is None or self.table_size is None:
                raise ValueError("tabulated requires table and table_size")
            if len(self.table) != self.table_size**d:
                raise ValueError("table must hold table_size**dimension values")
        if family == StructureFamily.COSINE_SERIES:
            if not self.terms:
                raise ValueError("cosine-series requires at least one term")
            if any(len(t.frequency) != d for t in self.terms):
                raise ValueError("cosine term frequency length must equal dimension")
        return self

    def describe(self) -> str:
        """Short deterministic identifier of the family and its parameters."""
        parts = [f"d={self.dimension}"]
        if self.delta is not None:
            parts.append(f"delta={self.delta!r}")
        if self.family == StructureFamily.STEALTHY_GAP and self.dimension > 1:
            parts.append(f"norm={self.gap_norm.value}")
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha!r}")
            parts.append(f"p={self.p!r}")
        if self.alphas is not None:
            parts.append("alphas=" + ",".join(repr(a) for a in self.alphas))
        if self.table_size is not None:
            parts.append(f"N={self.table_size}")
        if self.terms is not None:
            parts.append(
                "terms=" + ";".join(
                    f"{'/'.join(str(m) for m in t.frequency)}:{t.amplitude!r}" for t in self.terms
                )
            )
        return f"{self.family.value}[{' '.join(parts)}]"


class StructureFunction(BaseModel):
    """A normalized structure function, immutable after construction."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: StructureFunctionSpec = Field(..., description="Family and parameters")
    raw_mean: float = Field(..., gt=0, description="(2π)^{-d}∫ of the raw functional form")
    normalization: float = Field(..., gt=0, description="Constant c making K(0) = 1")
    normalization_error: float = Field(default=0.0, ge=0, description="Quadrature error of raw_mean")
    grid: Any = Field(default=None, description="Tabulated values as an N^d ndarray")

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def family(self) -> StructureFamily:
        return self.spec.family

    @property
    def identifier(self) -> str:
        return self.spec.describe()

    def grid_array(self) -> np.ndarray:
        if self.grid is None:
            raise AttributeError("only tabulated models carry a grid")
        return np.asarray(self.grid)
