"""
Spectral Models

Builds normalized structure functions, evaluates them, and inverts them to
covariance kernels K(j) = (2π)^{-d} ∫ e^{-ij·θ} S(θ) dθ.

Kernel methods by family:
- constant, stealthy-gap, axes-stealthy, cosine-series: closed forms
- anisotropic-product (and radial-power in d = 1): the fractional-difference
  recursion for the coefficients of |2 sin(θ/2)|^α
- radial-power with p = 2: subordination, ρ^α = (s/Γ(1-s)) ∫ (1 - e^{-tρ²}) t^{-1-s} dt
  with s = α/2, where e^{-tρ²} factors over axes into scaled modified Bessel functions
- radial-power with p ≠ 2: midpoint DCT grids with Richardson extrapolation
- tabulated: exact Fourier coefficients of the periodic multilinear interpolant
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np
import structlog
from scipy import fft as sp_fft
from scipy import special

from src.config import get_settings
from src.models.domain import IndicatorMode
from src.models.errors import (
    ConstructionError,
    DomainError,
    InputValidationError,
    NumericError,
    ResourceError,
    SymmetryViolationError,
)
from src.models.kernel import CovarianceKernel
from src.models.quadrature import BoxRole, QuadratureResult, QuadratureSpec, RegionBox
from src.models.spectrum import (
    GapNorm,
    StructureFamily,
    StructureFunction,
    StructureFunctionSpec,
)
from src.models.values import ExtendedReal
from src.numerics.bessel import ball_transform
from src.numerics.quadrature import integrate_radial, integrate_torus

logger = structlog.get_logger(__name__)

Family = StructureFamily

_DOMAIN_SLACK = 1e-12
_SYMMETRY_POINTS = 64
_IMAG_TOLERANCE = 1e-6
_NONNEGATIVE_GRID_SIDE = {1: 4096, 2: 256, 3: 64}
# Subordination integral in u = log t
_SUB_U_MIN = -36.0
_SUB_U_MAX = 40.0
_SUB_STEP = 0.1
# scipy.special.ive loses precision (and returns nan) for large arguments.
_IVE_ASYMPTOTIC = 1e7
# Interface cuts at every grid node only for small tables
_TABLE_INTERFACE_MAX = 64


# =============================================================================
# Raw functional forms
# =============================================================================

def _chord(theta: np.ndarray) -> np.ndarray:
    """|2 sin(θ/2)|, the lattice symbol of the first difference."""
    return np.abs(2.0 * np.sin(0.5 * theta))


def _interpolate_table(grid: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Periodic multilinear interpolation of grid values at nodes -π + 2πi/N."""
    n = grid.shape[0]
    d = grid.ndim
    pos = (theta + math.pi) * (n / (2.0 * math.pi))
    base = np.floor(pos)
    frac = pos - base
    lower = base.astype(np.int64) % n
    upper = (lower + 1) % n
    out = np.zeros(len(theta))
    for corner in range(1 << d):
        weight = np.ones(len(theta))
        index = []
        for k in range(d):
            if corner >> k & 1:
                weight = weight * frac[:, k]
                index.append(upper[:, k])
            else:
                weight = weight * (1.0 - frac[:, k])
                index.append(lower[:, k])
        out += weight * grid[tuple(index)]
    return out


def raw_values(spec: StructureFunctionSpec, theta: np.ndarray, grid: np.ndarray | None = None) -> np.ndarray:
    """
    Unnormalized S at points of shape (n, d); no fundamental-domain check.

    Args:
        spec: Family and parameters
        theta: Points, shape (n, d)
        grid: Table as an N^d array (tabulated family)
    """
    x = np.asarray(theta, dtype=float)
    family = spec.family
    if family == Family.CONSTANT:
        return np.ones(len(x))
    if family == Family.STEALTHY_GAP:
        assert spec.delta is not None
        if spec.dimension == 1 or spec.gap_norm == GapNorm.SUP:
            norm = np.max(np.abs(x), axis=1)
        else:
            norm = np.linalg.norm(x, axis=1)
        return (norm > spec.delta).astype(float)
    if family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        return np.all(np.abs(x) > spec.delta, axis=1).astype(float)
    if family == Family.RADIAL_POWER:
        assert spec.alpha is not None
        rho = np.linalg.norm(_chord(x), ord=spec.p, axis=1)
        return rho**spec.alpha
    if family == Family.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        return np.prod(_chord(x) ** np.asarray(spec.alphas), axis=1)
    if family == Family.TABULATED:
        if grid is None:
            raise DomainError("tabulated evaluation needs the value grid")
        return _interpolate_table(grid, x)
    if family == Family.COSINE_SERIES:
        assert spec.terms is not None
        out = np.ones(len(x))
        for term in spec.terms:
            out += term.amplitude * np.cos(x @ np.asarray(term.frequency, dtype=float))
        return out
    raise DomainError(f"unknown family {family!r}")


def spectrum_values(S: StructureFunction, theta: np.ndarray) -> np.ndarray:
    """Normalized S at points of shape (n, d); no fundamental-domain check."""
    grid = S.grid_array() if S.family == Family.TABULATED else None
    return S.normalization * raw_values(S.spec, theta, grid)


def evaluate(S: StructureFunction, theta: float | Sequence[float] | np.ndarray) -> float | np.ndarray:
    """
    Normalized S(θ).

    Args:
        S: Structure function
        theta: One point (length d, or a scalar in d = 1) or an array of shape (n, d)

    Returns:
        A float for a single point, otherwise an array of length n

    Raises:
        DomainError: A coordinate outside [-π, π] (reduce modulo 2π first)
    """
    arr = np.asarray(theta, dtype=float)
    single = arr.ndim == 0 or (arr.ndim == 1 and S.dimension > 1) or (arr.ndim == 1 and arr.size == 1)
    points = arr.reshape(-1, S.dimension)
    if np.any(~np.isfinite(points)) or np.any(np.abs(points) > math.pi + _DOMAIN_SLACK):
        raise DomainError("theta must lie in [-pi, pi]^d")
    values = spectrum_values(S, points)
    return float(values[0]) if single else values


# =============================================================================
# Kernel coefficients of the raw forms
# =============================================================================

def _gap_coefficients(delta: float, j: np.ndarray) -> np.ndarray:
    """(2π)^{-1} ∫_{-δ}^{δ} e^{-ijθ} dθ = sin(δj)/(πj)."""
    return (delta / math.pi) * np.sinc(delta * np.asarray(j, dtype=float) / math.pi)


def fractional_difference_coefficients(alpha: float, radius: int) -> np.ndarray:
    """
    Fourier coefficients of |2 sin(θ/2)|^α for lags 0..radius.

    a(0) = Γ(α+1)/Γ(α/2+1)², a(j) = a(j-1)·(j-1-α/2)/(j+α/2).
    """
    a = np.empty(radius + 1)
    a[0] = math.gamma(alpha + 1.0) / math.gamma(alpha / 2.0 + 1.0) ** 2
    for j in range(1, radius + 1):
        a[j] = a[j - 1] * (j - 1.0 - alpha / 2.0) / (j + alpha / 2.0)
    return a


def _delta0(radius: int) -> np.ndarray:
    e = np.zeros(radius + 1)
    e[0] = 1.0
    return e


def _outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.multiply.outer, vectors)


def _nonnegative_lag_norms(dimension: int, radius: int) -> np.ndarray:
    axes = np.arange(radius + 1, dtype=float)
    sq = reduce(np.add.outer, [axes**2] * dimension)
    return np.sqrt(sq)


def _contract(v: np.ndarray, w: np.ndarray, dimension: int) -> np.ndarray:
    """Σ_u w(u) Π_k v[j_k, u] for every nonnegative lag vector."""
    if dimension == 1:
        return v @ w
    if dimension == 2:
        return (v * w) @ v.T
    letters = "abcdefgh"[:dimension]
    subscripts = ",".join(f"{ch}u" for ch in letters) + "->" + letters
    return np.einsum(subscripts, v * w, *([v] * (dimension - 1)), optimize=True)


def scaled_bessel_i(orders: np.ndarray, z: np.ndarray) -> np.ndarray:
    """
    e^{-z} I_n(z) on the outer grid orders × z.

    Past _IVE_ASYMPTOTIC the Hankel expansion
    (2πz)^{-1/2}[1 - (μ-1)/(8z) + (μ-1)(μ-9)/(2!(8z)²) - (μ-1)(μ-9)(μ-25)/(3!(8z)³)],
    μ = 4n², replaces the library call.
    """
    n = np.asarray(orders, dtype=float)[:, None]
    x = np.asarray(z, dtype=float)[None, :]
    large = x > _IVE_ASYMPTOTIC
    out = np.empty(np.broadcast_shapes(n.shape, x.shape))
    small = ~large[0]
    out[:, small] = special.ive(n, x[:, small])
    if np.any(large):
        xl = x[:, ~small]
        mu = 4.0 * n**2
        y = 8.0 * xl
        series = 1.0 - (mu - 1.0) / y * (1.0 - (mu - 9.0) / (2.0 * y) * (1.0 - (mu - 25.0) / (3.0 * y)))
        out[:, ~small] = series / np.sqrt(2.0 * math.pi * xl)
    return out


def _subordination_pass(dimension: int, alpha: float, radius: int, step: float) -> np.ndarray:
    s = alpha / 2.0
    d = dimension
    u = np.arange(_SUB_U_MIN, _SUB_U_MAX + 0.5 * step, step)
    t = np.exp(u)
    w = np.full(u.shape, step) * t ** (-s)
    w[0] *= 0.5
    w[-1] *= 0.5

    v = scaled_bessel_i(np.arange(radius + 1), 2.0 * t)
    tail = (4.0 * math.pi) ** (-d / 2.0) * t[-1] ** (-(d / 2.0 + s)) / (d / 2.0 + s)
    q = -(_contract(v, w, d) + tail)

    # Origin: subtract (1 - e^{-ct}) whose integral is c^s Γ(1-s)/s.
    c = 2.0 * d
    g0 = -np.expm1(d * np.log(np.maximum(v[0], 1e-300)))
    h = -np.expm1(-c * t)
    q[(0,) * d] = float(np.dot(g0 - h, w)) + c**s * math.gamma(1.0 - s) / s - tail
    return (s / math.gamma(1.0 - s)) * q


def _subordination_quadrant(dimension: int, alpha: float, radius: int) -> tuple[np.ndarray, float]:
    fine = _subordination_pass(dimension, alpha, radius, _SUB_STEP)
    coarse = _subordination_pass(dimension, alpha, radius, 2.0 * _SUB_STEP)
    return fine, float(np.max(np.abs(fine - coarse)))


def _dct_quadrant(
    spec: StructureFunctionSpec, radius: int, tolerance: float
) -> tuple[np.ndarray, float, bool]:
    """Midpoint-grid coefficients of a radial-power form, extrapolated in the grid size."""
    settings = get_settings()
    d = spec.dimension
    assert spec.alpha is not None
    n = max(64, 1 << math.ceil(math.log2(4 * (radius + 1))))
    previous: np.ndarray | None = None
    best: np.ndarray | None = None
    error = math.inf
    while n <= settings.kernel_grid_max and n**d * 8 <= settings.memory_budget_bytes:
        theta = (np.arange(n) + 0.5) * math.pi / n
        chord = _chord(theta)
        if math.isinf(spec.p):
            rho = reduce(np.maximum.outer, [chord] * d)
        else:
            rho = reduce(np.add.outer, [chord**spec.p] * d) ** (1.0 / spec.p)
        grid = rho**spec.alpha
        q = sp_fft.dctn(grid, type=2)[(slice(0, radius + 1),) * d] / (2.0 * n) ** d
        if previous is not None:
            error = float(np.max(np.abs(q - previous))) / 3.0
            best = q + (q - previous) / 3.0
            if error <= tolerance:
                return best, error, True
        else:
            best = q
        previous = q
        n *= 2
    if best is None:
        raise ResourceError("kernel grid exceeds the memory budget; lower the lag radius")
    logger.warning("DCT kernel unconverged", identifier=spec.describe(), error=error)
    return best, error, False


def _quadrant(
    spec: StructureFunctionSpec, radius: int, tolerance: float
) -> tuple[np.ndarray, float, bool, str]:
    """Raw coefficients for nonnegative lags of a family even in every coordinate."""
    d = spec.dimension
    family = spec.family
    if family == Family.CONSTANT:
        return _outer([_delta0(radius)] * d), 0.0, True, "closed-form"
    if family == Family.STEALTHY_GAP:
        assert spec.delta is not None
        j = np.arange(radius + 1)
        if d == 1 or spec.gap_norm == GapNorm.SUP:
            gap = _outer([_gap_coefficients(spec.delta, j)] * d)
        else:
            norms = _nonnegative_lag_norms(d, radius)
            gap = np.asarray(ball_transform(d, spec.delta, norms)) / (2.0 * math.pi) ** d
        return _outer([_delta0(radius)] * d) - gap, 0.0, True, "closed-form"
    if family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        factor = _delta0(radius) - _gap_coefficients(spec.delta, np.arange(radius + 1))
        return _outer([factor] * d), 0.0, True, "closed-form"
    if family == Family.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        factors = [fractional_difference_coefficients(a, radius) for a in spec.alphas]
        return _outer(factors), 0.0, True, "fractional-difference"
    if family == Family.RADIAL_POWER:
        assert spec.alpha is not None
        if spec.alpha == 0.0:
            return _outer([_delta0(radius)] * d), 0.0, True, "closed-form"
        if d == 1:
            return fractional_difference_coefficients(spec.alpha, radius), 0.0, True, "fractional-difference"
        if spec.p == 2.0:
            q, err = _subordination_quadrant(d, spec.alpha, radius)
            return q, err, err <= tolerance, "bessel-subordination"
        q, err, ok = _dct_quadrant(spec, radius, tolerance)
        return q, err, ok, "dct-richardson"
    raise DomainError(f"family {family.value} is not even in every coordinate")


def _unfold(quadrant: np.ndarray, radius: int) -> np.ndarray:
    index = np.abs(np.arange(-radius, radius + 1))
    return quadrant[np.ix_(*([index] * quadrant.ndim))]


def _tabulated_table(grid: np.ndarray, radius: int) -> np.ndarray:
    n = grid.shape[0]
    d = grid.ndim
    coeffs = sp_fft.fftn(grid) / n**d
    lags = np.arange(-radius, radius + 1)
    sub = coeffs[np.ix_(*([lags % n] * d))]
    sign = _outer([(-1.0) ** np.abs(lags)] * d)
    taper = _outer([np.sinc(lags / n) ** 2] * d)
    table = sub * sign * taper
    imag = float(np.max(np.abs(table.imag))) if table.size else 0.0
    if imag > _IMAG_TOLERANCE:
        raise SymmetryViolationError(f"tabulated kernel has imaginary residue {imag:.3g}")
    return np.ascontiguousarray(table.real)


def _cosine_table(spec: StructureFunctionSpec, radius: int) -> np.ndarray:
    assert spec.terms is not None
    d = spec.dimension
    table = np.zeros((2 * radius + 1,) * d)
    table[(radius,) * d] = 1.0
    for term in spec.terms:
        m = np.asarray(term.frequency)
        if np.max(np.abs(m)) <= radius:
            table[tuple(radius + m)] += term.amplitude / 2.0
            table[tuple(radius - m)] += term.amplitude / 2.0
    return table


def raw_kernel_table(
    S: StructureFunction | StructureFunctionSpec,
    radius: int,
    tolerance: float,
    grid: np.ndarray | None = None,
) -> tuple[np.ndarray, float, bool, str]:
    """
    Raw (unnormalized) kernel on the centered lag window of the given radius.

    Returns:
        (table, error estimate, converged, method)
    """
    spec = S.spec if isinstance(S, StructureFunction) else S
    if isinstance(S, StructureFunction) and spec.family == Family.TABULATED:
        grid = S.grid_array()
    d = spec.dimension
    if (2 * radius + 1) ** d * 8 > get_settings().memory_budget_bytes:
        raise ResourceError(f"lag window of radius {radius} in d={d} exceeds the memory budget")
    if spec.family == Family.TABULATED:
        if grid is None:
            raise DomainError("tabulated kernel needs the value grid")
        return _tabulated_table(grid, radius), 0.0, True, "fft-interpolant"
    if spec.family == Family.COSINE_SERIES:
        return _cosine_table(spec, radius), 0.0, True, "cosine-series"
    q, err, ok, method = _quadrant(spec, radius, tolerance)
    return _unfold(np.asarray(q, dtype=float).reshape((radius + 1,) * d), radius), err, ok, method


def covariance_kernel(S: StructureFunction, radius: int, tolerance: float | None = None) -> CovarianceKernel:
    """
    Kernel table K(j) for ‖j‖_∞ ≤ radius.

    Args:
        S: Normalized structure function
        radius: Lag window radius R ≥ 0
        tolerance: Absolute tolerance (defaults to the kernel_tolerance setting)

    Raises:
        DomainError: Negative radius
        SymmetryViolationError: Imaginary residue above 1e-6
        ResourceError: Window beyond the memory budget
    """
    if radius < 0:
        raise DomainError("lag window radius must be nonnegative")
    tol = tolerance if tolerance is not None else get_settings().kernel_tolerance
    table, err, ok, method = raw_kernel_table(S, radius, tol / S.normalization)
    values = S.normalization * table
    error = S.normalization * err
    if not ok:
        logger.warning("Kernel tolerance not met", identifier=S.identifier, error=error, tolerance=tol)
    logger.debug("Kernel computed", identifier=S.identifier, radius=radius, method=method)
    return CovarianceKernel(
        dimension=S.dimension,
        radius=radius,
        values=values,
        source=S.identifier,
        method=method,
        error_estimate=error,
        converged=ok,
    )


# =============================================================================
# Construction
# =============================================================================

def _validate_table(spec: StructureFunctionSpec) -> np.ndarray:
    assert spec.table is not None and spec.table_size is not None
    grid = np.asarray(spec.table, dtype=float).reshape((spec.table_size,) * spec.dimension)
    if not np.all(np.isfinite(grid)):
        raise InputValidationError("tabulated values must be finite")
    if np.any(grid < 0):
        raise InputValidationError("tabulated values must be nonnegative")
    n = spec.table_size
    reflect = (n - np.arange(n)) % n
    mirrored = grid[np.ix_(*([reflect] * spec.dimension))]
    if np.max(np.abs(grid - mirrored)) > 1e-12 * max(float(np.max(grid)), 1.0):
        raise InputValidationError("tabulated grid must be even: S(-θ) = S(θ)")
    if not np.any(grid > 0):
        raise InputValidationError("tabulated grid is identically zero")
    return grid


def _check_cosine_nonnegative(spec: StructureFunctionSpec) -> None:
    d = spec.dimension
    side = _NONNEGATIVE_GRID_SIDE.get(d, 16)
    axis = -math.pi + 2.0 * math.pi * np.arange(side) / side
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    rng = np.random.default_rng(0)
    points = np.vstack([points, rng.uniform(-math.pi, math.pi, size=(1024, d))])
    smallest = float(np.min(raw_values(spec, points)))
    if smallest < -1e-12:
        raise InputValidationError(f"cosine series is negative somewhere (min {smallest:.3g})")


def _raw_mean(spec: StructureFunctionSpec, grid: np.ndarray | None) -> tuple[float, float, bool]:
    """(2π)^{-d} ∫ raw S, with its error and convergence flag."""
    d = spec.dimension
    family = spec.family
    settings = get_settings()
    if family in (Family.CONSTANT, Family.COSINE_SERIES):
        return 1.0, 0.0, True
    if family == Family.STEALTHY_GAP:
        assert spec.delta is not None
        if d == 1 or spec.gap_norm == GapNorm.SUP:
            return 1.0 - (spec.delta / math.pi) ** d, 0.0, True
        volume = math.pi ** (d / 2.0) * spec.delta**d / math.gamma(d / 2.0 + 1.0)
        return 1.0 - volume / (2.0 * math.pi) ** d, 0.0, True
    if family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        return (1.0 - spec.delta / math.pi) ** d, 0.0, True
    if family == Family.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        return math.prod(fractional_difference_coefficients(a, 0)[0] for a in spec.alphas), 0.0, True
    if family == Family.TABULATED:
        assert grid is not None
        return float(grid.mean()), 0.0, True
    if family == Family.RADIAL_POWER:
        assert spec.alpha is not None
        if spec.alpha == 0.0:
            return 1.0, 0.0, True
        if d == 1:
            return float(fractional_difference_coefficients(spec.alpha, 0)[0]), 0.0, True
        if spec.p == 2.0:
            q, err = _subordination_quadrant(d, spec.alpha, 0)
            return float(q.reshape(-1)[0]), err, err <= settings.quadrature_tolerance * 10
        quad = integrate_torus(
            lambda th: raw_values(spec, th),
            QuadratureSpec(
                dimension=d,
                tolerance=settings.quadrature_tolerance,
                max_depth=settings.quadrature_max_depth,
                max_levels=settings.quadrature_max_levels,
                boxes=(RegionBox.point((0.0,) * d),),
            ),
        )
        return quad.value / (2.0 * math.pi) ** d, quad.error_estimate / (2.0 * math.pi) ** d, quad.converged
    raise DomainError(f"unknown family {family!r}")


def _check_symmetry(S: StructureFunction) -> None:
    rng = np.random.default_rng(12345)
    theta = rng.uniform(-math.pi, math.pi, size=(_SYMMETRY_POINTS, S.dimension))
    forward = spectrum_values(S, theta)
    backward = spectrum_values(S, -theta)
    if np.max(np.abs(forward - backward)) > 1e-10 * max(float(np.max(np.abs(forward))), 1.0):
        raise InputValidationError("structure function is not symmetric: S(-θ) != S(θ)")


def make_structure_function(spec: StructureFunctionSpec) -> StructureFunction:
    """
    Build a normalized structure function.

    Steps:
    1. Validate family content (nonnegative even tables, nonnegative cosine series)
    2. Compute the raw mean (2π)^{-d}∫S (closed form or quadrature)
    3. Fix c = 1/raw mean so that K(0) = 1
    4. Check S(-θ) = S(θ) at random points

    Raises:
        InputValidationError: Negative, asymmetric or non-finite content
        ConstructionError: The normalization integral did not converge or vanished
    """
    grid = _validate_table(spec) if spec.family == Family.TABULATED else None
    if spec.family == Family.COSINE_SERIES:
        _check_cosine_nonnegative(spec)

    mean, error, converged = _raw_mean(spec, grid)
    if not converged:
        raise ConstructionError(
            f"normalization integral unconverged for {spec.describe()} (error {error:.3g})"
        )
    if not mean > 0 or not math.isfinite(mean):
        raise ConstructionError(f"normalization integral is {mean!r} for {spec.describe()}")

    S = StructureFunction(
        spec=spec,
        raw_mean=mean,
        normalization=1.0 / mean,
        normalization_error=error,
        grid=grid,
    )
    _check_symmetry(S)
    logger.info(
        "Structure function built",
        identifier=S.identifier,
        normalization=S.normalization,
    )
    return S


# =============================================================================
# Spectral integration
# =============================================================================

@dataclass(frozen=True)
class SpectralLayout:
    """Where S is singular or discontinuous, in the terms the integrators use."""

    radial: bool = False
    boxes: tuple[RegionBox, ...] = ()
    radial_breaks: tuple[float, ...] = ()
    axis_breaks: tuple[float, ...] = ()


def _table_nodes(n: int) -> np.ndarray:
    return -math.pi + 2.0 * math.pi * np.arange(n) / n


def spectral_layout(S: StructureFunction, vanishes_with_s: bool = True) -> SpectralLayout:
    """
    Integration layout of a family.

    Args:
        S: Structure function
        vanishes_with_s: The integrand is zero wherever S is, so gaps may be excluded
    """
    spec = S.spec
    d = spec.dimension
    gap_role = BoxRole.EXCLUDED if vanishes_with_s else BoxRole.INTERFACE
    family = spec.family
    if family == Family.STEALTHY_GAP:
        assert spec.delta is not None
        if d > 1 and spec.gap_norm == GapNorm.EUCLIDEAN:
            return SpectralLayout(radial=True, radial_breaks=(spec.delta,))
        box = RegionBox(lo=(-spec.delta,) * d, hi=(spec.delta,) * d, role=gap_role)
        return SpectralLayout(boxes=(box,), axis_breaks=(spec.delta,))
    if family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        boxes = tuple(RegionBox.slab(d, k, -spec.delta, spec.delta, gap_role) for k in range(d))
        return SpectralLayout(boxes=boxes, axis_breaks=(spec.delta,))
    if family == Family.RADIAL_POWER:
        if d == 1:
            return SpectralLayout(boxes=(RegionBox.point((0.0,)),))
        return SpectralLayout(radial=True)
    if family == Family.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        boxes = tuple(RegionBox.slab(d, k, 0.0, 0.0) for k, a in enumerate(spec.alphas) if a > 0)
        return SpectralLayout(boxes=boxes)
    if family == Family.TABULATED:
        assert spec.table_size is not None
        nodes = _table_nodes(spec.table_size)
        breaks = tuple(sorted({abs(float(x)) for x in nodes if 0 < abs(x) < math.pi}))
        if spec.table_size > _TABLE_INTERFACE_MAX:
            return SpectralLayout(axis_breaks=breaks)
        boxes = tuple(
            RegionBox.slab(d, k, float(x), float(x), BoxRole.INTERFACE)
            for k in range(d)
            for x in nodes
            if x > -math.pi
        )
        return SpectralLayout(boxes=boxes, axis_breaks=breaks)
    return SpectralLayout()


def integrate_spectrum(
    S: StructureFunction,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    *,
    vanishes_with_s: bool = True,
    r_min: float = 0.0,
    r_max: float = math.inf,
    singular: Sequence[RegionBox] = (),
    radial_breaks: Sequence[float] = (),
    resolution: int = 16,
    tolerance: float | None = None,
) -> QuadratureResult:
    """
    ∫ fn(θ, S(θ)) dθ over the torus (or the shell r_min ≤ ‖θ‖ ≤ r_max).

    Radial families and shells go through the pyramid integrator, the rest
    through the panel/midpoint integrator with the family's boxes.
    """
    settings = get_settings()
    tol = tolerance if tolerance is not None else settings.quadrature_tolerance
    layout = spectral_layout(S, vanishes_with_s)
    d = S.dimension

    def integrand(theta: np.ndarray) -> np.ndarray:
        return np.asarray(fn(theta, spectrum_values(S, theta)), dtype=float)

    if layout.radial or r_min > 0.0 or math.isfinite(r_max):
        return integrate_radial(
            integrand,
            d,
            r_min=r_min,
            r_max=r_max,
            radial_breaks=tuple(layout.radial_breaks) + tuple(radial_breaks),
            axis_breaks=layout.axis_breaks,
            tolerance=tol,
        )
    spec = QuadratureSpec(
        dimension=d,
        resolution=resolution,
        tolerance=tol,
        max_depth=settings.quadrature_max_depth,
        max_levels=settings.quadrature_max_levels,
        boxes=layout.boxes + tuple(singular),
    )
    return integrate_torus(integrand, spec)


@dataclass(frozen=True)
class AxisFactor:
    """One-dimensional factor s_k of a separable S = Π_k s_k(θ_k)."""

    values: Callable[[np.ndarray], np.ndarray]
    gap: float | None = None  # factor vanishes on |x| < gap
    singular_at_zero: bool = False


def separable_factors(S: StructureFunction) -> list[AxisFactor] | None:
    """Per-axis factors when S is a product over coordinates, else None."""
    d = S.dimension
    scale = S.normalization ** (1.0 / d)
    spec = S.spec
    if spec.family == Family.CONSTANT or (
        spec.family == Family.RADIAL_POWER and spec.alpha == 0.0
    ):
        return [AxisFactor(values=lambda x: np.ones_like(x)) for _ in range(d)]
    if spec.family == Family.AXES_STEALTHY:
        delta = spec.delta
        assert delta is not None
        return [
            AxisFactor(values=lambda x: scale * (np.abs(x) > delta), gap=delta)
            for _ in range(d)
        ]
    if spec.family == Family.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        return [
            AxisFactor(
                values=lambda x, a=a: scale * _chord(x) ** a,
                singular_at_zero=a > 0,
            )
            for a in spec.alphas
        ]
    if d == 1 and spec.family in (Family.STEALTHY_GAP, Family.RADIAL_POWER):
        return [
            AxisFactor(
                values=lambda x: spectrum_values(S, x[:, None]),
                gap=spec.delta,
                singular_at_zero=spec.family == Family.RADIAL_POWER,
            )
        ]
    return None


# =============================================================================
# Limits
# =============================================================================

def _axis_zero_width(S: StructureFunction) -> float | None:
    """Half-width η of slabs |θ_k| < η around every axis on which a table vanishes."""
    grid = S.grid_array()
    n = grid.shape[0]
    nodes = _table_nodes(n)
    spacing = 2.0 * math.pi / n
    near = np.flatnonzero(np.abs(nodes) <= spacing + 1e-12)
    for axis in range(grid.ndim):
        if np.any(np.take(grid, near, axis=axis) != 0.0):
            return None
    return float(np.max(np.abs(nodes[near])))


def _tabulated_axis_integral(S: StructureFunction, weight: Callable[[np.ndarray], np.ndarray]) -> QuadratureResult:
    eta = _axis_zero_width(S)
    assert eta is not None
    settings = get_settings()
    d = S.dimension
    layout = spectral_layout(S)
    slabs = tuple(RegionBox.slab(d, k, -eta, eta, BoxRole.EXCLUDED) for k in range(d))
    spec = QuadratureSpec(
        dimension=d,
        resolution=max(16, S.spec.table_size or 16),
        tolerance=settings.quadrature_tolerance,
        max_depth=settings.quadrature_max_depth,
        max_levels=settings.quadrature_max_levels,
        boxes=layout.boxes + slabs,
    )
    return integrate_torus(lambda th: spectrum_values(S, th) * np.prod(weight(th), axis=1), spec)


def sigma_sq_d(S: StructureFunction) -> ExtendedReal:
    """
    σ_d² = 2^d ∫ S(x)/(x_1²…x_d²) dx, or +inf.

    Finiteness is decided by the family: the interval gap in d = 1, the
    axes-stealthy slabs, and tables vanishing on a neighbourhood of every
    coordinate hyperplane. Everything else touches an axis with S > 0.

    Raises:
        NumericError: Quadrature of a finite case did not converge
    """
    spec = S.spec
    d = S.dimension
    c = S.normalization
    if spec.family == Family.STEALTHY_GAP and d == 1:
        assert spec.delta is not None
        return ExtendedReal.finite(4.0 * c * (1.0 / spec.delta - 1.0 / math.pi))
    if spec.family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        return ExtendedReal.finite(2.0**d * c * (2.0 * (1.0 / spec.delta - 1.0 / math.pi)) ** d)
    if spec.family == Family.TABULATED and _axis_zero_width(S) is not None:
        result = _tabulated_axis_integral(S, lambda th: 1.0 / th**2)
        if not result.converged:
            raise NumericError(f"sigma_d^2 quadrature unconverged for {S.identifier}")
        return ExtendedReal.finite(2.0**d * result.value)
    return ExtendedReal.pos_inf()


def sigma_sq_limit(S: StructureFunction, mode: IndicatorMode = IndicatorMode.LATTICE) -> ExtendedReal:
    """
    Limiting variance of centered cubes and boxes under (2π)^{-d}∫|φ̂|²S.

    Lattice windows converge to (2π)^{-d}∫ S Π_k 1/(2 sin²(x_k/2)),
    continuum windows to (2π)^{-d} σ_d².
    """
    d = S.dimension
    if mode == IndicatorMode.CONTINUUM:
        sigma = sigma_sq_d(S)
        if not sigma.is_finite:
            return sigma
        return ExtendedReal.finite(sigma.to_float() / (2.0 * math.pi) ** d)
    spec = S.spec
    c = S.normalization
    if spec.family == Family.STEALTHY_GAP and d == 1:
        assert spec.delta is not None
        return ExtendedReal.finite(c / math.tan(spec.delta / 2.0) / math.pi)
    if spec.family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        return ExtendedReal.finite(c * (1.0 / math.tan(spec.delta / 2.0) / math.pi) ** d)
    if spec.family == Family.TABULATED and _axis_zero_width(S) is not None:
        result = _tabulated_axis_integral(S, lambda th: 0.5 / np.sin(0.5 * th) ** 2)
        if not result.converged:
            raise NumericError(f"variance-limit quadrature unconverged for {S.identifier}")
        return ExtendedReal.finite(result.value / (2.0 * math.pi) ** d)
    return ExtendedReal.pos_inf()


def gap_fraction(S: StructureFunction) -> float:
    """Lebesgue measure of {S = 0} divided by (2π)^d."""
    spec = S.spec
    d = S.dimension
    if spec.family == Family.STEALTHY_GAP:
        assert spec.delta is not None
        if d == 1 or spec.gap_norm == GapNorm.SUP:
            return (spec.delta / math.pi) ** d
        volume = math.pi ** (d / 2.0) * spec.delta**d / math.gamma(d / 2.0 + 1.0)
        return volume / (2.0 * math.pi) ** d
    if spec.family == Family.AXES_STEALTHY:
        assert spec.delta is not None
        return 1.0 - (1.0 - spec.delta / math.pi) ** d
    if spec.family == Family.TABULATED:
        grid = S.grid_array()
        zero = grid == 0.0
        for axis in range(grid.ndim):
            zero = zero & np.roll(zero, -1, axis=axis)
        return float(zero.mean())
    return 0.0
