"""
Report Models

Tabular results of parameter sweeps.
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.values import ExtendedReal


class ScanPoint(BaseModel):
    """One statistic at one grid value."""

    value: float = Field(..., description="Scan variable value")
    stat: str = Field(..., description="Statistic name")
    stat_value: float = Field(..., description="Computed statistic")
    stat_err: float = Field(..., ge=0, description="Error estimate of the statistic")
    mode: str = Field(..., description="How the statistic was computed")
    converged: bool = Field(default=True)


class FitSummary(BaseModel):
    """Least-squares fit of log stat against log scan variable."""

    beta: float = Field(..., description="Fitted power-law exponent")
    beta_stderr: float = Field(..., ge=0)
    gamma: float = Field(..., description="Log-power divided out before fitting")
    intercept: float
    r_squared: float = Field(..., ge=0, le=1)
    predicted_beta: float | None = None
    predicted_gamma: float | None = None


class ScanReport(BaseModel):
    """Result of a sweep over one scan variable."""

    scan_var: str = Field(..., description="Name of the scan variable")
    grid: list[float] = Field(..., description="Strictly increasing scan grid")
    points: list[ScanPoint] = Field(default_factory=list)
    fit: FitSummary | None = None
    hypothesis_met: bool = Field(
        default=True, description="False when the model does not declare the hypothesis behind the statistic"
    )
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_grid(self) -> "ScanReport":
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("scan grid must be strictly increasing")
        grid = set(self.grid)
        if any(p.value not in grid for p in self.points):
            raise ValueError("scan point outside the grid")
        return self

    def stat_values(self, stat: str) -> np.ndarray:
        """Values of one statistic in grid order."""
        lookup = {p.value: p.stat_value for p in self.points if p.stat == stat}
        return np.array([lookup[v] for v in self.grid])

    def stat_errors(self, stat: str) -> np.ndarray:
        lookup = {p.value: p.stat_err for p in self.points if p.stat == stat}
        return np.array([lookup[v] for v in self.grid])

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)


class EntropyCell(BaseModel):
    """Per-site quantities for one (L, ε) pair."""

    L: float
    eps: float = Field(..., ge=0)
    n_points: int = Field(..., ge=1)
    logdet_per_site: ExtendedReal
    entropy_per_site: ExtendedReal
    szego_ref: ExtendedReal

    @model_validator(mode="after")
    def check_finite_for_positive_eps(self) -> "EntropyCell":
        if self.eps > 0 and not (self.logdet_per_site.is_finite and self.entropy_per_site.is_finite):
            raise ValueError("per-site values must be finite for eps > 0")
        return self


class EntropyScan(BaseModel):
    """Grid of per-site log-determinants and entropies."""

    shape: str
    dimension: int = Field(..., ge=1)
    L_grid: list[float]
    eps_grid: list[float]
    cells: list[EntropyCell] = Field(default_factory=list)
    hypothesis_met: bool = Field(
        default=True, description="False for window shapes outside the Szegő-limit hypothesis"
    )
    metadata: dict[str, Any] = Field(default_factory=dict)

    def cell(self, L: float, eps: float) -> EntropyCell:
        for c in self.cells:
            if c.L == L and c.eps == eps:
                return c
        raise KeyError((L, eps))


class Estimate(BaseModel):
    """A computed number with its error estimate and provenance."""

    value: float
    error: float = Field(default=0.0, ge=0, description="Absolute error estimate")
    converged: bool = True
    method: str = Field(..., description="spectral, direct or monte-carlo")
    mode: str = Field(default="lattice", description="Indicator transform used")


class CovarianceRow(BaseModel):
    """One offset of a box covariance grid."""

    offset: tuple[int, ...]
    value: float
    error: float = Field(default=0.0, ge=0)
    predicted_limit: float | None = None
    ratio: float | None = None
    converged: bool = True


class BallGridDecomposition(BaseModel):
    """Ball variance split over a grid of blocks of side ~√L."""

    L: float
    block: int = Field(..., ge=1, description="Block side")
    n_interior: int = Field(..., ge=0, description="Blocks inside the ball")
    n_boundary: int = Field(..., ge=0, description="Blocks meeting the sphere")
    interior_variance: float = Field(..., description="Σ over interior blocks of Cov(Q_block, Q_ball)")
    boundary_variance: float = Field(..., description="Σ over boundary blocks of Cov(Q_block∩ball, Q_ball)")
    total_variance: float
