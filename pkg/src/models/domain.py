"""
Domain Model

Observation windows on Z^d:
- BALL: closed Euclidean ball ‖x‖₂ ≤ L centered at 0
- CUBE: closed centered cube [-L, L]^d
- BOX: offset box C_L^(n) = Π_k [n_k L, (n_k+1) L), half-open by default
  so that boxes of one scale tile space; closed=True gives Π [n_k L, (n_k+1) L]
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DomainShape(str, Enum):
    BALL = "ball"
    CUBE = "cube"
    BOX = "box"


class IndicatorMode(str, Enum):
    """Which Fourier transform of a window indicator is used."""
    CONTINUUM = "continuum"
    LATTICE = "lattice"


class Domain(BaseModel):
    """A scaled observation window."""

    model_config = ConfigDict(frozen=True)

    shape: DomainShape = Field(..., description="Window shape")
    scale: float = Field(..., gt=0, description="Scale L")
    dimension: int = Field(..., ge=1, description="Dimension d")
    offset: tuple[int, ...] | None = Field(default=None, description="Box offset n (box only)")
    closed: bool = Field(default=False, description="Closed upper faces (box only)")

    @model_validator(mode="after")
    def check_offset(self) -> "Domain":
        if self.shape == DomainShape.BOX:
            if self.offset is None or len(self.offset) != self.dimension:
                raise ValueError("box domains need an offset of length dimension")
            if any(n < 0 for n in self.offset):
                raise ValueError("box offsets must be nonnegative")
        elif self.offset is not None:
            raise ValueError("only box domains carry an offset")
        return self

    @classmethod
    def ball(cls, scale: float, dimension: int) -> "Domain":
        return cls(shape=DomainShape.BALL, scale=scale, dimension=dimension)

    @classmethod
    def cube(cls, scale: float, dimension: int) -> "Domain":
        return cls(shape=DomainShape.CUBE, scale=scale, dimension=dimension)

    @classmethod
    def box(cls, scale: float, offset: tuple[int, ...], closed: bool = False) -> "Domain":
        return cls(
            shape=DomainShape.BOX,
            scale=scale,
            dimension=len(offset),
            offset=tuple(offset),
            closed=closed,
        )

    @property
    def convention(self) -> str:
        if self.shape == DomainShape.BALL:
            return "closed ball |x|_2 <= L"
        if self.shape == DomainShape.CUBE:
            return "closed cube [-L, L]^d"
        upper = "]" if self.closed else ")"
        return f"box prod [n_k L, (n_k+1) L{upper}"
