"""
Covariance Kernel Model

The lag table K(j) for ‖j‖_∞ ≤ R, stored as a centered (2R+1)^d array.
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.errors import UsageError


class CovarianceKernel(BaseModel):
    """Covariance lag table on a cubic lag window."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=1, description="Lattice dimension d")
    radius: int = Field(..., ge=0, description="Lag window radius R")
    values: Any = Field(..., description="Centered ndarray of shape (2R+1,)*d")
    source: str = Field(..., description="Identifier of the structure function or samples")
    method: str = Field(..., description="How the table was obtained")
    error_estimate: float = Field(default=0.0, ge=0, description="Max absolute error estimate")
    converged: bool = Field(default=True, description="Whether the computation met its tolerance")
    standard_errors: Any = Field(default=None, description="Per-lag standard errors (estimates only)")

    @model_validator(mode="after")
    def check_shape(self) -> "CovarianceKernel":
        expected = (2 * self.radius + 1,) * self.dimension
        values = np.asarray(self.values)
        if values.shape != expected:
            raise ValueError(f"kernel table shape {values.shape} != {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("kernel table must be finite")
        if self.standard_errors is not None and np.shape(self.standard_errors) != expected:
            raise ValueError("standard errors must match the table shape")
        return self

    @property
    def table(self) -> np.ndarray:
        return np.asarray(self.values)

    @property
    def center(self) -> float:
        """K(0)."""
        return float(self.table[(self.radius,) * self.dimension])

    def at(self, lags: np.ndarray) -> np.ndarray:
        """
        Look up K at integer lags.

        Args:
            lags: Integer array of shape (..., d)

        Returns:
            Array of shape lags.shape[:-1]
        """
        lags = np.asarray(lags)
        if lags.shape[-1] != self.dimension:
            raise UsageError("lag vectors have the wrong dimension")
        if lags.size and int(np.abs(lags).max()) > self.radius:
            raise UsageError(
                f"lag {int(np.abs(lags).max())} exceeds the kernel window radius {self.radius}"
            )
        index = tuple(np.moveaxis(lags + self.radius, -1, 0))
        return self.table[index]

    def window(self, radius: int) -> np.ndarray:
        """Centered sub-table of a smaller radius."""
        if radius > self.radius:
            raise UsageError(f"requested radius {radius} exceeds kernel radius {self.radius}")
        cut = slice(self.radius - radius, self.radius + radius + 1)
        return self.table[(cut,) * self.dimension]

    def lag_vectors(self) -> np.ndarray:
        """All lags of the window in lexicographic order, shape (n, d)."""
        axes = [np.arange(-self.radius, self.radius + 1)] * self.dimension
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=-1)
