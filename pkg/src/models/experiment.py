"""
Experiment Configuration

One JSON document per run. The structure spec, geometry and grids are
validated here; command-specific requirements are checked by the tool
that runs the command.
"""

import math
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.domain import DomainShape, IndicatorMode
from src.models.field import TransformKind
from src.models.spectrum import StructureFunctionSpec


class CommandName(str, Enum):
    SAMPLE = "sample"
    KERNEL = "kernel"
    VARIANCE_SCAN = "variance-scan"
    COVARIANCE_GRID = "covariance-grid"
    THETA_SCAN = "theta-scan"
    CLT = "clt"
    ENTROPY_SCAN = "entropy-scan"


STOCHASTIC_COMMANDS = frozenset({CommandName.SAMPLE, CommandName.CLT})


class GeometrySpec(BaseModel):
    """Window description for the commands that need one."""

    shape: DomainShape = Field(default=DomainShape.CUBE, description="Window shape")
    L: float | None = Field(default=None, gt=0, description="Scale for single-scale commands")
    offsets: list[tuple[int, ...]] | None = Field(
        default=None, description="Box offsets for covariance-grid"
    )
    offset_max: int | None = Field(
        default=None, ge=0, description="Use every offset in {0..offset_max}^d"
    )

    @field_validator("offsets")
    @classmethod
    def validate_offsets(cls, v: list[tuple[int, ...]] | None) -> list[tuple[int, ...]] | None:
        if v is not None and any(n < 0 for offset in v for n in offset):
            raise ValueError("offsets must be nonnegative")
        return v


class GridSpec(BaseModel):
    """Scan grids."""

    L: list[float] = Field(default_factory=list, description="Window scales")
    eps: list[float] = Field(default_factory=list, description="Spectral perturbations")

    @field_validator("L")
    @classmethod
    def validate_scales(cls, v: list[float]) -> list[float]:
        if any(x <= 0 for x in v):
            raise ValueError("scales must be positive")
        return v

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, v: list[float]) -> list[float]:
        if any(x < 0 for x in v):
            raise ValueError("eps values must be nonnegative")
        return v


class OutputSpec(BaseModel):
    """Where and what to write."""

    directory: Path | None = Field(default=None, description="Output directory (--out overrides)")
    prefix: str = Field(default="", description="Prefix for every output file name")
    dump_fields: bool = Field(default=False, description="Write SPF1 dumps of sampled fields")


class ExperimentConfig(BaseModel):
    """A complete, schema-valid experiment."""

    command: CommandName
    structure: StructureFunctionSpec
    geometry: GeometrySpec = Field(default_factory=GeometrySpec)
    grids: GridSpec = Field(default_factory=GridSpec)
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    mode: IndicatorMode = Field(default=IndicatorMode.LATTICE)
    transform: TransformKind = Field(default=TransformKind.NONE)
    torus_side: int | None = Field(default=None, ge=8, description="Torus side N")
    samples: int = Field(default=1, ge=1, description="Number of fields (sample command)")
    replicates: int = Field(default=1000, ge=1, description="Monte Carlo replicates (clt)")
    radius: int = Field(default=8, ge=0, description="Lag window radius (kernel command)")
    splitting_constant: float = Field(default=math.pi, gt=0, description="c of the Θ functional")
    covariance_method: Literal["spectral", "direct"] = Field(
        default="spectral", description="Route of covariance-grid values"
    )
    grid_file: Path | None = Field(default=None, description="Tabulated grid file")
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def check_seed(self) -> "ExperimentConfig":
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValueError(f"command {self.command.value!r} needs a seed")
        return self


class ToolOutcome(BaseModel):
    """What a command produced."""

    outputs: list[Path] = Field(default_factory=list, description="Files written, in order")
    errors: dict[str, Any] = Field(default_factory=dict, description="Per-statistic error estimates")
    converged: bool = Field(default=True, description="False when any statistic missed its tolerance")
    summary: dict[str, Any] = Field(default_factory=dict, description="Values echoed into the manifest")
