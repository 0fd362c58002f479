"""
Pydantic Models

Core data structures:
- StructureFunction: normalized spectral density model
- CovarianceKernel: lag table K(j)
- FieldSample: one realization on the torus
- Domain: observation window
- ScanReport / EntropyScan: sweep results
- CorrelationTable: block values for cumulant algebra
- ExperimentConfig: CLI run description
"""

from src.models.correlation import (
    CorrelationTable,
    CumulantEstimate,
    CumulantEstimates,
)
from src.models.domain import Domain, DomainShape, IndicatorMode
from src.models.errors import (
    ConstructionError,
    DegenerateInputError,
    DomainError,
    GeometryError,
    InputValidationError,
    NumericError,
    ResourceError,
    SpectralFieldError,
    SymmetryViolationError,
    UsageError,
)
from src.models.experiment import (
    CommandName,
    ExperimentConfig,
    GeometrySpec,
    GridSpec,
    OutputSpec,
    ToolOutcome,
)
from src.models.field import FieldSample, TransformKind
from src.models.kernel import CovarianceKernel
from src.models.quadrature import BoxRole, QuadratureResult, QuadratureSpec, RegionBox
from src.models.reports import (
    BallGridDecomposition,
    CovarianceRow,
    EntropyCell,
    Estimate,
    EntropyScan,
    FitSummary,
    ScanPoint,
    ScanReport,
)
from src.models.spectrum import (
    CosineTerm,
    Envelope,
    EnvelopeDirection,
    GapNorm,
    StructureFamily,
    StructureFunction,
    StructureFunctionSpec,
)
from src.models.values import ExtendedKind, ExtendedReal

__all__ = [
    # Correlations
    "CorrelationTable",
    "CumulantEstimate",
    "CumulantEstimates",
    # Domains
    "Domain",
    "DomainShape",
    "IndicatorMode",
    # Errors
    "ConstructionError",
    "DegenerateInputError",
    "DomainError",
    "GeometryError",
    "InputValidationError",
    "NumericError",
    "ResourceError",
    "SpectralFieldError",
    "SymmetryViolationError",
    "UsageError",
    # Experiments
    "CommandName",
    "ExperimentConfig",
    "GeometrySpec",
    "GridSpec",
    "OutputSpec",
    "ToolOutcome",
    # Fields
    "FieldSample",
    "TransformKind",
    # Kernels
    "CovarianceKernel",
    # Quadrature
    "BoxRole",
    "QuadratureResult",
    "QuadratureSpec",
    "RegionBox",
    # Reports
    "BallGridDecomposition",
    "CovarianceRow",
    "EntropyCell",
    "Estimate",
    "EntropyScan",
    "FitSummary",
    "ScanPoint",
    "ScanReport",
    # Spectra
    "CosineTerm",
    "Envelope",
    "EnvelopeDirection",
    "GapNorm",
    "StructureFamily",
    "StructureFunction",
    "StructureFunctionSpec",
    # Values
    "ExtendedKind",
    "ExtendedReal",
]
