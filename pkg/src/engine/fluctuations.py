"""
Fluctuations

Variances and covariances of local masses Q_Λ = Σ_{i∈Λ} X_i.

Two exact routes agree up to kernel and quadrature tolerances:
- spectral: Var(Q_Λ) = (2π)^{-d} ∫ |φ̂_Λ(θ)|² S(θ) dθ over the torus
- direct: Var(Q_Λ) = Σ_{i,j∈Λ} K(i-j), summed through the lag histogram
  of the window (a cross-correlation of indicator masks)

On top of them sit the box covariance limits, the Θ functional of the
ball variance, exponent scans and the bulk/boundary decompositions.
"""

import math
from collections.abc import Callable, Sequence
from functools import partial

import numpy as np
import structlog
from joblib import Parallel, delayed
from scipy import signal, stats

from src.config import get_settings
from src.engine.geometry import (
    bounding_box,
    dirichlet_run,
    indicator_ft,
    indicator_mask,
    local_mass,
)
from src.engine.sampler import sample_statistics
from src.engine.spectral_models import (
    AxisFactor,
    covariance_kernel,
    integrate_spectrum,
    separable_factors,
    sigma_sq_limit,
    spectrum_values,
)
from src.models.domain import Domain, DomainShape, IndicatorMode
from src.models.errors import DomainError, SymmetryViolationError, UsageError
from src.models.field import FieldSample
from src.models.kernel import CovarianceKernel
from src.models.quadrature import BoxRole, QuadratureSpec, RegionBox
from src.models.reports import (
    BallGridDecomposition,
    CovarianceRow,
    Estimate,
    FitSummary,
    ScanPoint,
    ScanReport,
)
from src.models.spectrum import StructureFamily, StructureFunction
from src.models.values import ExtendedReal
from src.numerics.quadrature import integrate_torus

logger = structlog.get_logger(__name__)

SPECTRAL_TOLERANCE = 1e-7
IMAGINARY_TOLERANCE = 1e-8
NAIVE_MAX_POINTS = 1024
MIN_SCAN_POINTS = 5
_IMAG_CHECK_POINTS = 1 << 20


# =============================================================================
# Direct sums
# =============================================================================

def _kernel_for(S: StructureFunction, radius: int, kernel: CovarianceKernel | None) -> CovarianceKernel:
    if kernel is None:
        return covariance_kernel(S, radius)
    if kernel.radius < radius:
        raise UsageError(f"kernel radius {kernel.radius} is short of the required {radius}")
    return kernel


def pair_sum(
    kernel: CovarianceKernel,
    mask_a: np.ndarray,
    lo_a: np.ndarray,
    mask_b: np.ndarray,
    lo_b: np.ndarray,
) -> float:
    """
    Σ_{i∈A, j∈B} K(i - j) for two windows given as masks with lower corners.

    The lag histogram is the full cross-correlation of the masks; lag
    k (in correlation index) corresponds to i - j = lo_a - lo_b + k.
    """
    counts = np.rint(signal.correlate(mask_a.astype(float), mask_b.astype(float), mode="full", method="fft"))
    R = kernel.radius
    index = []
    for k in range(kernel.dimension):
        first = int(lo_a[k] - lo_b[k] - (mask_b.shape[k] - 1))
        last = first + counts.shape[k] - 1
        if max(abs(first), abs(last)) > R:
            raise UsageError(
                f"lags up to {max(abs(first), abs(last))} exceed the kernel radius {R}"
            )
        index.append(slice(R + first, R + last + 1))
    return float(np.sum(counts * kernel.table[tuple(index)]))


def _naive_sum(kernel: CovarianceKernel, points: np.ndarray) -> float:
    total = 0.0
    step = max(1, (1 << 20) // max(len(points), 1))
    for start in range(0, len(points), step):
        diff = points[start:start + step, None, :] - points[None, :, :]
        total += float(kernel.at(diff).sum())
    return total


def window_diameter(domain: Domain) -> int:
    lo, hi = bounding_box(domain)
    return int(np.max(hi - lo))


def variance_direct(
    S: StructureFunction, domain: Domain, kernel: CovarianceKernel | None = None
) -> Estimate:
    """
    Σ_{i,j∈Λ} K(i-j), the brute-force oracle of the spectral variance.

    Small windows sum over point pairs; larger ones go through the lag
    histogram.

    Raises:
        UsageError: A supplied kernel does not reach the window diameter
    """
    mask, lo = indicator_mask(domain)
    kernel = _kernel_for(S, window_diameter(domain), kernel)
    n = int(mask.sum())
    if n <= NAIVE_MAX_POINTS:
        points = np.argwhere(mask) + lo
        value = _naive_sum(kernel, points)
    else:
        value = pair_sum(kernel, mask, lo, mask, lo)
    return Estimate(
        value=value,
        error=kernel.error_estimate * n * n,
        converged=kernel.converged,
        method="direct",
        mode=IndicatorMode.LATTICE.value,
    )


# =============================================================================
# Spectral integrals
# =============================================================================

def _axis_transform(domain: Domain, axis: int, x: np.ndarray, mode: IndicatorMode) -> np.ndarray:
    """One-dimensional factor of a cube or box indicator transform."""
    L = domain.scale
    if mode == IndicatorMode.LATTICE:
        lo, hi = bounding_box(domain)
        return dirichlet_run(lo[axis], hi[axis], x)
    if domain.shape == DomainShape.CUBE:
        return (2.0 * L * np.sinc(L * x / math.pi)).astype(complex)
    assert domain.offset is not None
    n = domain.offset[axis]
    return L * np.sinc(L * x / (2.0 * math.pi)) * np.exp(-1j * L * (n + 0.5) * x)


def _resolution(*domains: Domain) -> int:
    spans = []
    for a in domains:
        lo_a, hi_a = bounding_box(a)
        for b in domains:
            lo_b, hi_b = bounding_box(b)
            spans.append(int(np.max(np.maximum(np.abs(hi_a - lo_b), np.abs(hi_b - lo_a)))))
    return 2 * max(spans) + 16


def _axis_integral(
    factor: AxisFactor,
    fn: Callable[[np.ndarray], np.ndarray],
    resolution: int,
    tolerance: float,
) -> tuple[complex, float, bool]:
    settings = get_settings()
    boxes: list[RegionBox] = []
    if factor.gap is not None:
        boxes.append(RegionBox(lo=(-factor.gap,), hi=(factor.gap,), role=BoxRole.EXCLUDED))
    if factor.singular_at_zero:
        boxes.append(RegionBox.point((0.0,)))
    spec = QuadratureSpec(
        dimension=1,
        resolution=resolution,
        tolerance=tolerance,
        max_depth=settings.quadrature_max_depth,
        max_levels=settings.quadrature_max_levels,
        boxes=tuple(boxes),
    )

    def part(theta: np.ndarray, imag: bool) -> np.ndarray:
        x = theta[:, 0]
        z = fn(x) * factor.values(x)
        return z.imag if imag else z.real

    re = integrate_torus(partial(part, imag=False), spec)
    im = integrate_torus(partial(part, imag=True), spec)
    value = complex(re.value, im.value) / (2.0 * math.pi)
    error = (re.error_estimate + im.error_estimate) / (2.0 * math.pi)
    return value, error, re.converged and im.converged


def _separable_cross(
    factors: list[AxisFactor],
    a: Domain,
    b: Domain,
    mode: IndicatorMode,
    tolerance: float,
) -> tuple[complex, float, bool]:
    resolution = _resolution(a, b)
    value = complex(1.0)
    rel_error = 0.0
    converged = True
    for k, factor in enumerate(factors):
        def fn(x: np.ndarray, k: int = k) -> np.ndarray:
            return _axis_transform(a, k, x, mode) * np.conj(_axis_transform(b, k, x, mode))

        part, err, ok = _axis_integral(factor, fn, resolution, tolerance / len(factors))
        value *= part
        rel_error += err / max(abs(part), 1e-300)
        converged = converged and ok
    return value, abs(value) * rel_error, converged


def _spectral_cross(
    S: StructureFunction,
    a: Domain,
    b: Domain,
    mode: IndicatorMode,
    tolerance: float,
) -> tuple[complex, float, bool]:
    """(2π)^{-d} ∫ φ̂_a conj(φ̂_b) S, real part by quadrature and imaginary part checked."""
    d = S.dimension
    separable = a.shape != DomainShape.BALL and b.shape != DomainShape.BALL
    factors = separable_factors(S) if separable else None
    if factors is not None:
        return _separable_cross(factors, a, b, mode, tolerance)

    def real_part(theta: np.ndarray, s: np.ndarray) -> np.ndarray:
        z = np.asarray(indicator_ft(a, theta, mode)) * np.conj(np.asarray(indicator_ft(b, theta, mode)))
        return z.real * s

    result = integrate_spectrum(S, real_part, resolution=_resolution(a, b), tolerance=tolerance)
    scale = (2.0 * math.pi) ** d
    imag = 0.0 if a == b else _imaginary_residue(S, a, b, mode)
    return complex(result.value / scale, imag), result.error_estimate / scale, result.converged


def _imaginary_residue(S: StructureFunction, a: Domain, b: Domain, mode: IndicatorMode) -> float:
    d = S.dimension
    side = max(2, min(_resolution(a, b), int(_IMAG_CHECK_POINTS ** (1.0 / d))))
    axis = -math.pi + (np.arange(side) + 0.5) * 2.0 * math.pi / side
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    theta = np.stack([m.ravel() for m in mesh], axis=-1)
    z = np.asarray(indicator_ft(a, theta, mode)) * np.conj(np.asarray(indicator_ft(b, theta, mode)))
    return float(np.sum(z.imag * spectrum_values(S, theta))) / side**d


def variance_spectral(
    S: StructureFunction,
    domain: Domain,
    mode: IndicatorMode = IndicatorMode.LATTICE,
    tolerance: float = SPECTRAL_TOLERANCE,
) -> Estimate:
    """
    (2π)^{-d} ∫ |φ̂_Λ|² S by quadrature.

    Cubes and boxes under separable S reduce to products of one-dimensional
    integrals; everything else integrates on the torus with the family layout.
    """
    value, error, converged = _spectral_cross(S, domain, domain, mode, tolerance)
    if not converged:
        logger.warning("Spectral variance unconverged", identifier=S.identifier, scale=domain.scale)
    return Estimate(value=value.real, error=error, converged=converged, method="spectral", mode=mode.value)


def covariance_boxes(
    S: StructureFunction,
    L: float,
    offset: Sequence[int],
    mode: IndicatorMode = IndicatorMode.LATTICE,
    method: str = "spectral",
    closed: bool = False,
    tolerance: float = SPECTRAL_TOLERANCE,
) -> Estimate:
    """
    E[Q_{C_L^(0)} Q_{C_L^(n)}].

    Raises:
        SymmetryViolationError: Imaginary residue of the spectral route above 1e-8
        UsageError: Unknown method, or the direct route outside lattice mode
    """
    d = S.dimension
    if len(offset) != d:
        raise DomainError("offset length must equal the dimension")
    base = Domain.box(L, (0,) * d, closed=closed)
    other = Domain.box(L, tuple(int(n) for n in offset), closed=closed)
    if method == "direct":
        if mode != IndicatorMode.LATTICE:
            raise UsageError("the direct route sums lattice points; use mode=lattice")
        mask_a, lo_a = indicator_mask(base)
        mask_b, lo_b = indicator_mask(other)
        _, hi_a = bounding_box(base)
        _, hi_b = bounding_box(other)
        radius = int(np.max(np.maximum(np.abs(lo_a - hi_b), np.abs(hi_a - lo_b))))
        kernel = covariance_kernel(S, radius)
        n_pairs = float(mask_a.sum() * mask_b.sum())
        return Estimate(
            value=pair_sum(kernel, mask_a, lo_a, mask_b, lo_b),
            error=kernel.error_estimate * n_pairs,
            converged=kernel.converged,
            method="direct",
            mode=mode.value,
        )
    if method != "spectral":
        raise UsageError(f"unknown covariance method {method!r}")
    value, error, converged = _spectral_cross(S, base, other, mode, tolerance)
    if abs(value.imag) > IMAGINARY_TOLERANCE * max(1.0, abs(value.real)):
        raise SymmetryViolationError(f"cross-spectral integral has imaginary part {value.imag:.3g}")
    return Estimate(value=value.real, error=error, converged=converged, method="spectral", mode=mode.value)


def covariance_limit(sigma_sq: float | ExtendedReal, offset: Sequence[int]) -> float:
    """
    Limit of the box covariance: (-1)^j σ²/2^j for j = #{k: n_k = 1}, 0 when disjoint.

    Raises:
        DomainError: Negative offsets or a non-finite σ²
    """
    if any(n < 0 for n in offset):
        raise DomainError("offsets must be nonnegative")
    sigma = sigma_sq.to_float() if isinstance(sigma_sq, ExtendedReal) else float(sigma_sq)
    if not math.isfinite(sigma):
        raise DomainError("covariance limits need a finite sigma^2")
    if any(n >= 2 for n in offset):
        return 0.0
    j = sum(1 for n in offset if n == 1)
    return (-1) ** j * sigma / 2**j


def covariance_grid(
    S: StructureFunction,
    L: float,
    offsets: Sequence[Sequence[int]],
    mode: IndicatorMode = IndicatorMode.LATTICE,
    method: str = "spectral",
    workers: int | None = None,
) -> list[CovarianceRow]:
    """Box covariances at each offset, next to the predicted limit and their ratio."""
    sigma = sigma_sq_limit(S, mode)
    n_jobs = workers if workers is not None else get_settings().n_jobs
    estimates = Parallel(n_jobs=n_jobs)(
        delayed(covariance_boxes)(S, L, tuple(n), mode, method) for n in offsets
    )
    rows = []
    for n, est in zip(offsets, estimates):
        predicted = covariance_limit(sigma, n) if sigma.is_finite else None
        ratio = est.value / predicted if predicted else None
        rows.append(
            CovarianceRow(
                offset=tuple(int(k) for k in n),
                value=est.value,
                error=est.error,
                predicted_limit=predicted,
                ratio=ratio,
                converged=est.converged,
            )
        )
    return rows


# =============================================================================
# Θ functional and scans
# =============================================================================

def theta_ball(S: StructureFunction, L: float, c: float = math.pi) -> Estimate:
    """
    L^{2d} ∫_{‖ξ‖≤c/L} S + L^{d-1} ∫_{‖ξ‖>c/L} S(ξ)/‖ξ‖^{d+1} dξ.

    The inner ball and the outer region are integrated separately.
    """
    if c <= 0 or L <= 0:
        raise DomainError("theta_ball needs c > 0 and L > 0")
    d = S.dimension
    radius = c / L
    inner = integrate_spectrum(S, lambda th, s: s, r_max=radius, tolerance=1e-9)
    outer = integrate_spectrum(
        S,
        lambda th, s: s / np.linalg.norm(th, axis=1) ** (d + 1),
        r_min=radius,
        tolerance=1e-9,
    )
    value = L ** (2 * d) * inner.value + L ** (d - 1) * outer.value
    error = L ** (2 * d) * inner.error_estimate + L ** (d - 1) * outer.error_estimate
    converged = inner.converged and outer.converged
    if not converged:
        logger.warning("Theta functional unconverged", identifier=S.identifier, L=L)
    return Estimate(value=value, error=error, converged=converged, method="spectral", mode="continuum")


def predicted_exponents(S: StructureFunction, shape: DomainShape) -> tuple[float | None, float]:
    """
    Model-predicted growth Var ~ (log L)^τ L^β of centered windows.

    Returns:
        (β or None when no prediction applies, τ)
    """
    d = S.dimension
    spec = S.spec
    family = spec.family
    if family == StructureFamily.CONSTANT:
        return float(d), 0.0
    if family == StructureFamily.RADIAL_POWER:
        assert spec.alpha is not None
        if spec.alpha < 1.0:
            return d - spec.alpha, 0.0
        return d - 1.0, 1.0
    if family == StructureFamily.ANISOTROPIC_PRODUCT:
        assert spec.alphas is not None
        if shape == DomainShape.BALL and d > 1:
            return None, 0.0
        tau = float(sum(1 for a in spec.alphas if a == 1.0))
        return d - sum(a for a in spec.alphas if a < 1.0) - tau, tau
    if family == StructureFamily.AXES_STEALTHY:
        return (0.0 if shape != DomainShape.BALL else d - 1.0), 0.0
    if family == StructureFamily.STEALTHY_GAP:
        if d == 1:
            return 0.0, 0.0
        return d - 1.0, 0.0
    at_origin = float(spectrum_values(S, np.zeros((1, d)))[0])
    return (float(d) if at_origin > 0 else None), 0.0


def fit_exponent(scales: Sequence[float], values: Sequence[float], gamma: float = 0.0) -> FitSummary:
    """Least squares of log(value/(log L)^γ) against log L."""
    x = np.log(np.asarray(scales, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if gamma:
        y = y - gamma * np.log(x)
    fit = stats.linregress(x, y)
    return FitSummary(
        beta=float(fit.slope),
        beta_stderr=float(fit.stderr),
        gamma=gamma,
        intercept=float(fit.intercept),
        r_squared=float(min(max(fit.rvalue**2, 0.0), 1.0)),
    )


def _check_scan_grid(grid: Sequence[float]) -> list[float]:
    values = sorted(float(v) for v in grid)
    if len(values) < MIN_SCAN_POINTS:
        raise UsageError(f"scans need at least {MIN_SCAN_POINTS} grid points, got {len(values)}")
    if values[-1] < 10.0 * values[0]:
        raise UsageError("scan grid must span at least one decade")
    if values[0] <= 1.0:
        raise UsageError("scan scales must exceed 1 so that log L is positive")
    return values


def _window(shape: DomainShape, L: float, d: int) -> Domain:
    if shape == DomainShape.BALL:
        return Domain.ball(L, d)
    if shape == DomainShape.CUBE:
        return Domain.cube(L, d)
    raise UsageError("scans use ball or cube windows")


def _scan_variance(S: StructureFunction, shape: DomainShape, L: float, mode: IndicatorMode) -> Estimate:
    domain = _window(shape, L, S.dimension)
    if mode == IndicatorMode.LATTICE:
        return variance_direct(S, domain)
    return variance_spectral(S, domain, mode)


def exponent_scan(
    S: StructureFunction,
    shape: DomainShape,
    scales: Sequence[float],
    mode: IndicatorMode = IndicatorMode.LATTICE,
    workers: int | None = None,
) -> ScanReport:
    """
    Variance growth exponent of centered windows.

    The lattice variance is evaluated through the lag histogram (equal to
    the spectral integral); the model's log power τ is divided out before
    the log-log fit.

    Raises:
        UsageError: Fewer than five scales or less than a decade
    """
    grid = _check_scan_grid(scales)
    beta_pred, tau = predicted_exponents(S, shape)
    n_jobs = workers if workers is not None else get_settings().n_jobs
    estimates = Parallel(n_jobs=n_jobs)(
        delayed(_scan_variance)(S, shape, L, mode) for L in grid
    )
    fit = fit_exponent(grid, [e.value for e in estimates], tau)
    fit = fit.model_copy(update={"predicted_beta": beta_pred, "predicted_gamma": tau})
    points = [
        ScanPoint(value=L, stat="variance", stat_value=e.value, stat_err=e.error, mode=mode.value, converged=e.converged)
        for L, e in zip(grid, estimates)
    ]
    logger.info(
        "Exponent scan finished",
        identifier=S.identifier,
        shape=shape.value,
        beta=fit.beta,
        predicted=beta_pred,
    )
    return ScanReport(
        scan_var="L",
        grid=grid,
        points=points,
        fit=fit,
        metadata={"structure": S.identifier, "shape": shape.value, "mode": mode.value, "statistic": "variance"},
    )


def _theta_point(S: StructureFunction, L: float, c: float) -> tuple[Estimate, Estimate]:
    return variance_direct(S, Domain.ball(L, S.dimension)), theta_ball(S, L, c)


_REGULAR_AT_ORIGIN = frozenset(
    {StructureFamily.CONSTANT, StructureFamily.STEALTHY_GAP, StructureFamily.RADIAL_POWER}
)


def envelope_hypothesis(S: StructureFunction) -> tuple[bool, str | None]:
    """
    Whether S is regular at the origin, and on what grounds.

    A declared envelope is trusted. Constant, stealthy-gap and radial-power
    models have a spherical average that is monotone near 0 by construction.
    """
    if S.spec.envelope is not None:
        return True, "declared"
    if S.family in _REGULAR_AT_ORIGIN:
        return True, "family"
    return False, None


def theta_scan(
    S: StructureFunction,
    scales: Sequence[float],
    c: float = math.pi,
    workers: int | None = None,
) -> ScanReport:
    """Ratio of ball variance to the Θ functional, with the trend slope of its log."""
    grid = _check_scan_grid(scales)
    n_jobs = workers if workers is not None else get_settings().n_jobs
    pairs = Parallel(n_jobs=n_jobs)(delayed(_theta_point)(S, L, c) for L in grid)
    points = []
    ratios = []
    for L, (var, theta) in zip(grid, pairs):
        ratio = var.value / theta.value
        rel = var.error / abs(var.value) + theta.error / abs(theta.value)
        ratios.append(ratio)
        points.append(
            ScanPoint(
                value=L,
                stat="ratio",
                stat_value=ratio,
                stat_err=abs(ratio) * rel,
                mode="lattice/continuum",
                converged=var.converged and theta.converged,
            )
        )
    fit = fit_exponent(grid, ratios).model_copy(update={"predicted_beta": 0.0, "predicted_gamma": 0.0})
    regular, source = envelope_hypothesis(S)
    if not regular:
        logger.warning("No envelope declared; the Θ sandwich is not guaranteed", identifier=S.identifier)
    return ScanReport(
        scan_var="L",
        grid=grid,
        points=points,
        fit=fit,
        hypothesis_met=regular,
        metadata={
            "structure": S.identifier,
            "shape": "ball",
            "splitting_constant": c,
            "statistic": "ratio",
            "envelope": source,
        },
    )


# =============================================================================
# Bulk and boundary decompositions
# =============================================================================

def neighbourhood_covariance_sum(S: StructureFunction, block: float) -> Estimate:
    """
    Σ_{q ∈ {-1,0,1}^d} Cov(Q_B, Q_{B+q·block}) for a bulk box B of side block.

    Equals Cov(Q_B, Q_U) where U is the union of the 3^d neighbours.
    """
    d = S.dimension
    center = Domain.box(block, (1,) * d)
    union = Domain.box(3.0 * block, (0,) * d)
    mask_c, lo_c = indicator_mask(center)
    mask_u, lo_u = indicator_mask(union)
    kernel = covariance_kernel(S, int(np.max(mask_u.shape)))
    value = pair_sum(kernel, mask_c, lo_c, mask_u, lo_u)
    return Estimate(
        value=value,
        error=kernel.error_estimate * float(mask_c.sum() * mask_u.sum()),
        converged=kernel.converged,
        method="direct",
    )


def _block_sums(values: np.ndarray, block: int) -> np.ndarray:
    d = values.ndim
    padded_shape = tuple(math.ceil(s / block) * block for s in values.shape)
    padded = np.zeros(padded_shape, dtype=values.dtype)
    padded[tuple(slice(0, s) for s in values.shape)] = values
    split = []
    for s in padded_shape:
        split.extend([s // block, block])
    return padded.reshape(split).sum(axis=tuple(range(1, 2 * d, 2)))


def ball_grid_decomposition(S: StructureFunction, L: float, block: int | None = None) -> BallGridDecomposition:
    """
    Split Var(Q_ball) over a grid of blocks of side ⌈√L⌉.

    With g = K ⋆ 1_ball, the block A carries Σ_{i∈A∩ball} g(i); interior
    blocks lie inside the ball, boundary blocks meet its complement.
    """
    side = block if block is not None else math.ceil(math.sqrt(L))
    if side < 1:
        raise DomainError("block side must be positive")
    domain = Domain.ball(L, S.dimension)
    mask, _ = indicator_mask(domain)
    radius = int(max(mask.shape)) - 1
    kernel = covariance_kernel(S, radius)
    full = signal.fftconvolve(kernel.table, mask.astype(float), mode="full")
    g = full[tuple(slice(radius, radius + s) for s in mask.shape)]
    carried = _block_sums(g * mask, side)
    members = _block_sums(mask.astype(np.int64), side)
    interior = members == side**S.dimension
    boundary = (members > 0) & ~interior
    return BallGridDecomposition(
        L=L,
        block=side,
        n_interior=int(interior.sum()),
        n_boundary=int(boundary.sum()),
        interior_variance=float(carried[interior].sum()),
        boundary_variance=float(carried[boundary].sum()),
        total_variance=float(carried.sum()),
    )


# =============================================================================
# Monte Carlo
# =============================================================================

def _squared_mass(domain: Domain, field: FieldSample) -> float:
    return local_mass(field, domain) ** 2


def variance_monte_carlo(
    S: StructureFunction,
    domain: Domain,
    side: int,
    replicates: int,
    seed: int,
    workers: int | None = None,
) -> Estimate:
    """Mean of Q² over sampled fields, with its standard error."""
    if replicates < 2:
        raise UsageError("need at least two replicates")
    lo, hi = bounding_box(domain)
    if side < 8 * int(np.max(hi - lo + 1)) // 2:
        logger.warning("Torus small relative to the window", side=side, window=int(np.max(hi - lo + 1)))
    squares = np.asarray(
        sample_statistics(S, side, seed, replicates, partial(_squared_mass, domain), workers=workers),
        dtype=float,
    )
    return Estimate(
        value=float(squares.mean()),
        error=float(squares.std(ddof=1) / math.sqrt(replicates)),
        method="monte-carlo",
    )

