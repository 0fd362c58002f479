"""
Entropy

Covariance matrices of Gaussian fields on lattice windows, their
differential entropy, and the Szegő reference (2π)^{-d} ∫ log S.

Perturbations S + ε enter the matrices as Σ + εI (exact) and the
references as log(S + ε) under the integral.
"""

import math
from collections.abc import Sequence

import numpy as np
import structlog
from joblib import Parallel, delayed

from src.config import get_settings
from src.engine.geometry import lattice_points
from src.engine.spectral_models import covariance_kernel, integrate_spectrum
from src.models.domain import Domain, DomainShape
from src.models.errors import DomainError, NumericError, ResourceError, UsageError
from src.models.kernel import CovarianceKernel
from src.models.reports import EntropyCell, EntropyScan
from src.models.spectrum import StructureFamily, StructureFunction
from src.models.values import ExtendedReal
from src.numerics.linalg import check_symmetric, log_det_psd

logger = structlog.get_logger(__name__)

HALF_LOG_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)

_GAP_FAMILIES = frozenset({StructureFamily.STEALTHY_GAP, StructureFamily.AXES_STEALTHY})


def covariance_matrix(
    S: StructureFunction,
    points: np.ndarray,
    kernel: CovarianceKernel | None = None,
) -> np.ndarray:
    """
    Σ = (K(i - j)) over a list of lattice points.

    Raises:
        ResourceError: More points than the dense budget
        UsageError: A supplied kernel is too short for the point spread
    """
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != S.dimension:
        raise UsageError(f"points must have shape (n, {S.dimension})")
    n = len(pts)
    budget = get_settings().dense_budget
    if n > budget:
        raise ResourceError(f"{n} points exceed the dense budget of {budget}; use a smaller L")
    radius = int(np.max(np.ptp(pts, axis=0))) if n else 0
    if kernel is None:
        kernel = covariance_kernel(S, radius)
    elif kernel.radius < radius:
        raise UsageError(f"kernel radius {kernel.radius} is short of the point spread {radius}")
    return kernel.at(pts[:, None, :] - pts[None, :, :])


def gaussian_entropy(matrix: np.ndarray, jitter: float = 0.0) -> ExtendedReal:
    """
    h = (n/2) log(2πe) + ½ log det(M + jitter·I).

    A singular M without jitter gives the -∞ sentinel.
    """
    m = check_symmetric(matrix)
    log_det = log_det_psd(m, jitter)
    if not log_det.is_finite:
        return log_det
    return ExtendedReal.finite(m.shape[0] * HALF_LOG_2PI_E + 0.5 * log_det.to_float())


def szego_limit(S: StructureFunction, eps: float = 0.0) -> ExtendedReal:
    """
    (2π)^{-d} ∫ log(S + ε) over the torus.

    Gap families at ε = 0 vanish on a set of positive measure and return
    the -∞ sentinel.
    """
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if eps == 0.0 and S.family in _GAP_FAMILIES:
        return ExtendedReal.neg_inf()
    if eps == 0.0 and S.family == StructureFamily.TABULATED and _tabulated_has_zero_cell(S):
        return ExtendedReal.neg_inf()

    def integrand(theta: np.ndarray, s: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(s + eps)

    result = integrate_spectrum(S, integrand, vanishes_with_s=False)
    if not math.isfinite(result.value):
        return ExtendedReal.neg_inf()
    if not result.converged:
        logger.warning("Szego integral unconverged", identifier=S.identifier, eps=eps, error=result.error_estimate)
    return ExtendedReal.finite(result.value / (2.0 * math.pi) ** S.dimension, converged=result.converged)


def _tabulated_has_zero_cell(S: StructureFunction) -> bool:
    """Whether the interpolated table vanishes on a whole grid cell."""
    zero = S.grid_array() == 0.0
    cell = zero.copy()
    for axis in range(zero.ndim):
        cell = cell & np.roll(cell, -1, axis=axis)
    return bool(cell.any())


def window(shape: DomainShape, L: float, dimension: int) -> Domain:
    if shape == DomainShape.BALL:
        return Domain.ball(L, dimension)
    if shape == DomainShape.CUBE:
        return Domain.cube(L, dimension)
    raise UsageError("entropy scans use ball or cube windows")


def _entropy_column(
    S: StructureFunction,
    shape: DomainShape,
    L: float,
    eps_grid: Sequence[float],
    references: dict[float, ExtendedReal],
) -> list[EntropyCell]:
    points = lattice_points(window(shape, L, S.dimension))
    matrix = covariance_matrix(S, points)
    n = len(points)
    cells = []
    for eps in eps_grid:
        try:
            log_det = log_det_psd(matrix, eps)
        except NumericError:
            if eps > 0.0:
                raise
            # Indefinite only at kernel precision: the unperturbed matrix is singular.
            logger.warning("Unperturbed covariance numerically indefinite", L=L, n_points=n)
            log_det = ExtendedReal.neg_inf()
        if log_det.is_finite:
            per_site = ExtendedReal.finite(log_det.to_float() / n)
            entropy = ExtendedReal.finite(HALF_LOG_2PI_E + 0.5 * per_site.to_float())
        else:
            per_site = entropy = log_det
        cells.append(
            EntropyCell(
                L=L,
                eps=eps,
                n_points=n,
                logdet_per_site=per_site,
                entropy_per_site=entropy,
                szego_ref=references[eps],
            )
        )
    logger.debug("Entropy column", L=L, n_points=n)
    return cells


def entropy_scan(
    S: StructureFunction,
    shape: DomainShape,
    scales: Sequence[float],
    eps_grid: Sequence[float],
    workers: int | None = None,
) -> EntropyScan:
    """
    Per-site log det(Σ_L + εI) and Gaussian entropy over an (L, ε) grid.

    Each L builds its covariance matrix once and factors it for every ε.
    The Szegő reference of S + ε accompanies each cell.

    Raises:
        UsageError: Empty grids
        ResourceError: A window beyond the dense budget
    """
    if not scales or not eps_grid:
        raise UsageError("entropy scans need nonempty L and eps grids")
    if any(e < 0 for e in eps_grid):
        raise DomainError("eps values must be nonnegative")
    L_grid = sorted(float(L) for L in scales)
    eps_values = sorted({float(e) for e in eps_grid}, reverse=True)
    budget = get_settings().dense_budget
    for L in L_grid:
        n = len(lattice_points(window(shape, L, S.dimension)))
        if n > budget:
            raise ResourceError(f"L = {L} gives {n} points, over the dense budget of {budget}; use a smaller L")

    references = {eps: szego_limit(S, eps) for eps in eps_values}
    n_jobs = workers if workers is not None else get_settings().n_jobs
    columns = Parallel(n_jobs=n_jobs)(
        delayed(_entropy_column)(S, shape, L, eps_values, references) for L in L_grid
    )
    hypothesis_met = not (shape == DomainShape.CUBE and S.dimension > 1)
    if not hypothesis_met:
        logger.warning("Cube windows fall outside the Szego-limit hypothesis", dimension=S.dimension)
    return EntropyScan(
        shape=shape.value,
        dimension=S.dimension,
        L_grid=L_grid,
        eps_grid=eps_values,
        cells=[cell for column in columns for cell in column],
        hypothesis_met=hypothesis_met,
        metadata={"structure": S.identifier},
    )
