"""
Geometry

Observation windows on Z^d, their lattice point sets and local masses, and
the Fourier transforms of their indicators.

Continuum transforms:
- cube [-L, L]^d: Π_k 2 sin(L x_k)/x_k
- box Π[n_k L, (n_k+1) L]: Π_k L e^{-i(n_k+1/2)L x_k} sin(L x_k/2)/(L x_k/2)
- ball: (2π)^{d/2} L^{d/2} ‖ξ‖^{-d/2} J_{d/2}(L‖ξ‖), d ≤ 3

Lattice transforms are the exact sums Σ_{i∈Λ} e^{-iξ·i}, assembled from
one-dimensional Dirichlet runs along the first axis.
"""

import math

import numpy as np
import structlog

from src.models.domain import Domain, DomainShape, IndicatorMode
from src.models.errors import DomainError, GeometryError
from src.models.field import FieldSample
from src.numerics.bessel import ball_transform
from src.numerics.quadrature import integrate_ball

logger = structlog.get_logger(__name__)

_BALL_SLACK = 1e-12
_MAX_CONTINUUM_BALL_DIMENSION = 3


# =============================================================================
# Point sets
# =============================================================================

def _axis_range(domain: Domain, axis: int) -> tuple[int, int]:
    """Inclusive integer range of the window along one axis."""
    L = domain.scale
    if domain.shape in (DomainShape.CUBE, DomainShape.BALL):
        m = math.floor(L * (1.0 + _BALL_SLACK))
        return -m, m
    assert domain.offset is not None
    n = domain.offset[axis]
    lo = math.ceil(n * L)
    if domain.closed:
        hi = math.floor((n + 1) * L)
    else:
        hi = math.ceil((n + 1) * L) - 1
    return lo, hi


def bounding_box(domain: Domain) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive lower and upper integer corners of the window."""
    ranges = [_axis_range(domain, k) for k in range(domain.dimension)]
    return np.array([a for a, _ in ranges]), np.array([b for _, b in ranges])


def indicator_mask(domain: Domain) -> tuple[np.ndarray, np.ndarray]:
    """
    0/1 membership array on the bounding box.

    Returns:
        (mask of shape hi - lo + 1, lower corner lo)
    """
    lo, hi = bounding_box(domain)
    shape = tuple(int(s) for s in np.maximum(hi - lo + 1, 0))
    if domain.shape != DomainShape.BALL:
        return np.ones(shape, dtype=bool), lo
    axes = [np.arange(a, b + 1) ** 2 for a, b in zip(lo, hi)]
    sq = axes[0]
    for a in axes[1:]:
        sq = np.add.outer(sq, a)
    limit = domain.scale**2 * (1.0 + _BALL_SLACK)
    return np.asarray(sq <= limit, dtype=bool).reshape(shape), lo


def lattice_points(domain: Domain) -> np.ndarray:
    """All lattice points of the window in lexicographic order, shape (n, d)."""
    mask, lo = indicator_mask(domain)
    return np.argwhere(mask) + lo


def point_count(domain: Domain) -> int:
    mask, _ = indicator_mask(domain)
    return int(mask.sum())


# =============================================================================
# Local mass
# =============================================================================

def local_mass(field: FieldSample, domain: Domain, anchor: tuple[int, ...] | np.ndarray | None = None) -> float:
    """
    Q = Σ of field values over the window translated by anchor.

    Raises:
        GeometryError: The window's bounding box does not fit in the torus
    """
    if domain.dimension != field.dimension:
        raise GeometryError("window and field dimensions differ")
    mask, lo = indicator_mask(domain)
    n = field.side
    if any(s >= n for s in mask.shape):
        raise GeometryError(
            f"window bounding side {max(mask.shape)} does not fit in torus side {n}"
        )
    shift = np.zeros(domain.dimension, dtype=np.int64) if anchor is None else np.asarray(anchor)
    index = [
        (shift[k] + lo[k] + np.arange(mask.shape[k])) % n for k in range(domain.dimension)
    ]
    block = field.array[np.ix_(*index)]
    return float(block[mask].sum())


# =============================================================================
# Indicator transforms
# =============================================================================

def _as_points(xi: np.ndarray | tuple[float, ...] | float, dimension: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(xi, dtype=float)
    single = arr.ndim == 0 or (arr.ndim == 1 and (dimension > 1 or arr.size == 1))
    points = arr.reshape(-1, dimension)
    if not np.all(np.isfinite(points)):
        raise DomainError("frequency must be finite")
    return points, single


def dirichlet_run(a: int | np.ndarray, b: int | np.ndarray, x: np.ndarray) -> np.ndarray:
    """Σ_{i=a}^{b} e^{-ixi}; x is reduced modulo 2π first."""
    x = np.remainder(np.asarray(x, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    a = np.asarray(a)
    b = np.asarray(b)
    count = (b - a + 1).astype(float)
    half = 0.5 * x
    ratio = count * np.sinc(count * half / math.pi) / np.sinc(half / math.pi)
    return np.exp(-1j * x * (a + b) / 2.0) * np.where(count > 0, ratio, 0.0)


def _continuum(domain: Domain, points: np.ndarray) -> np.ndarray:
    L = domain.scale
    d = domain.dimension
    if domain.shape == DomainShape.CUBE:
        return np.prod(2.0 * L * np.sinc(L * points / math.pi), axis=1).astype(complex)
    if domain.shape == DomainShape.BOX:
        assert domain.offset is not None
        n = np.asarray(domain.offset, dtype=float)
        phase = np.exp(-1j * L * (n + 0.5) * points)
        return np.prod(L * np.sinc(L * points / (2.0 * math.pi)) * phase, axis=1)
    if d > _MAX_CONTINUUM_BALL_DIMENSION:
        raise DomainError(f"continuum ball transform needs Bessel order {d / 2}; supported for d <= 3")
    norms = np.linalg.norm(points, axis=1)
    return np.asarray(ball_transform(d, L, norms), dtype=float).astype(complex)


def _lattice(domain: Domain, points: np.ndarray) -> np.ndarray:
    if domain.shape != DomainShape.BALL:
        lo, hi = bounding_box(domain)
        out = np.ones(len(points), dtype=complex)
        for k in range(domain.dimension):
            out *= dirichlet_run(lo[k], hi[k], points[:, k])
        return out
    mask, lo = indicator_mask(domain)
    if domain.dimension == 1:
        idx = np.flatnonzero(mask)
        return dirichlet_run(lo[0] + idx[0], lo[0] + idx[-1], points[:, 0])
    # Each row of the ball along axis 0 is a contiguous run.
    rows = mask.reshape(mask.shape[0], -1)
    present = rows.any(axis=0)
    first = np.argmax(rows, axis=0)
    last = rows.shape[0] - 1 - np.argmax(rows[::-1], axis=0)
    rest_shape = mask.shape[1:]
    rest = np.stack(np.unravel_index(np.arange(rows.shape[1]), rest_shape), axis=-1) + lo[1:]
    first, last, rest = first[present], last[present], rest[present]
    out = np.zeros(len(points), dtype=complex)
    for start in range(0, len(first), 256):
        sl = slice(start, start + 256)
        phase = np.exp(-1j * points[:, 1:] @ rest[sl].T)
        runs = dirichlet_run(lo[0] + first[sl][None, :], lo[0] + last[sl][None, :], points[:, :1])
        out += np.sum(phase * runs, axis=1)
    return out


def indicator_ft(
    domain: Domain,
    xi: np.ndarray | tuple[float, ...] | float,
    mode: IndicatorMode = IndicatorMode.LATTICE,
) -> complex | np.ndarray:
    """
    Fourier transform of the window indicator at ξ.

    Args:
        domain: Window
        xi: One frequency vector or an array of shape (n, d)
        mode: CONTINUUM (closed forms) or LATTICE (exact finite sum)

    Returns:
        A complex number for one frequency, otherwise a complex array

    Raises:
        DomainError: Continuum ball with d > 3, or non-finite ξ
    """
    points, single = _as_points(xi, domain.dimension)
    if mode == IndicatorMode.CONTINUUM:
        values = _continuum(domain, points)
    else:
        values = _lattice(domain, points)
    return complex(values[0]) if single else values


def ball_transform_direct(dimension: int, scale: float, xi: np.ndarray | tuple[float, ...], tolerance: float = 1e-10) -> float:
    """
    ∫_{‖x‖≤L} cos(ξ·x) dx by polar quadrature.

    Independent of the Bessel route; the imaginary part vanishes by symmetry.
    """
    frequency = np.asarray(xi, dtype=float).reshape(dimension)
    result = integrate_ball(
        lambda x: np.cos(x @ frequency), dimension, scale, tolerance=tolerance
    )
    if not result.converged:
        logger.warning("Direct ball transform unconverged", error=result.error_estimate)
    return result.value
