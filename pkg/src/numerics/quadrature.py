"""
Quadrature on the frequency torus [-π, π]^d.

Two integrators share the QuadratureResult contract:

integrate_torus
    Tensor-product midpoint rule. The region is cut along every face of
    the declared boxes into panels; panels inside excluded boxes are
    dropped and panels touching singular boxes are subdivided dyadically
    (only along the axes where the singular box is thinner than the cell).
    The midpoint resolution of every leaf is doubled level by level and the
    level sums are extrapolated Romberg-style over the declared error
    exponents. Spectrally accurate on smooth periodic integrands.

integrate_radial
    Pyramid decomposition for features centered at the origin: the cube is
    the union of 2d pyramids x = t·(±π e_a + u), |u_b| ≤ π, with Jacobian
    π t^{d-1}. Gauss-Legendre in u and t, with t split at every radial
    breakpoint r/ρ(u) and slab breakpoint β/|w_b(u)|, and geometrically
    graded panels toward t = 0 for origin singularities.
"""

import itertools
import math
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np
import structlog

from src.models.errors import DomainError, NumericError
from src.models.quadrature import BoxRole, QuadratureResult, QuadratureSpec, RegionBox

logger = structlog.get_logger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

TWO_PI = 2.0 * math.pi
_CHUNK_POINTS = 1 << 20
_MAX_LEVEL_POINTS = 1 << 26


def torus_volume(dimension: int) -> float:
    """(2π)^d."""
    return TWO_PI**dimension


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


# =============================================================================
# Midpoint integrator
# =============================================================================

def _region_bounds(spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.region is None:
        return np.full(spec.dimension, -math.pi), np.full(spec.dimension, math.pi)
    return np.array(spec.region.lo, dtype=float), np.array(spec.region.hi, dtype=float)


def _panels(spec: QuadratureSpec, lo: np.ndarray, hi: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    cuts = []
    for axis in range(spec.dimension):
        points = {lo[axis], hi[axis]}
        for box in spec.boxes:
            for edge in (box.lo[axis], box.hi[axis]):
                if lo[axis] < edge < hi[axis]:
                    points.add(edge)
        cuts.append(sorted(points))

    excluded = [
        box for box in spec.boxes_with_role(BoxRole.EXCLUDED)
        if all(b > a for a, b in zip(box.lo, box.hi))
    ]
    panels = []
    for intervals in itertools.product(*[list(zip(c, c[1:])) for c in cuts]):
        p_lo = np.array([a for a, _ in intervals])
        p_hi = np.array([b for _, b in intervals])
        center = 0.5 * (p_lo + p_hi)
        if any(
            all(box.lo[k] <= center[k] <= box.hi[k] for k in range(spec.dimension))
            for box in excluded
        ):
            continue
        panels.append((p_lo, p_hi))
    return panels


def _refine(
    lo: np.ndarray,
    hi: np.ndarray,
    singular: Sequence[RegionBox],
    depth: int,
    leaves: list[tuple[np.ndarray, np.ndarray]],
) -> None:
    split_axes: set[int] = set()
    if depth > 0:
        for box in singular:
            if all(lo[k] <= box.hi[k] and box.lo[k] <= hi[k] for k in range(len(lo))):
                split_axes.update(
                    k for k in range(len(lo)) if box.hi[k] - box.lo[k] < hi[k] - lo[k]
                )
    if not split_axes:
        leaves.append((lo, hi))
        return
    mid = 0.5 * (lo + hi)
    halves = [((lo[k], mid[k]), (mid[k], hi[k])) if k in split_axes else ((lo[k], hi[k]),)
              for k in range(len(lo))]
    for choice in itertools.product(*halves):
        _refine(
            np.array([a for a, _ in choice]),
            np.array([b for _, b in choice]),
            singular,
            depth - 1,
            leaves,
        )


def _inside_any(points: np.ndarray, boxes: Sequence[RegionBox]) -> np.ndarray:
    inside = np.zeros(len(points), dtype=bool)
    for box in boxes:
        inside |= np.all((points >= np.array(box.lo)) & (points <= np.array(box.hi)), axis=1)
    return inside


class _Accumulator:
    """Evaluates an integrand on batched midpoint sets."""

    def __init__(self, f: Integrand, singular: Sequence[RegionBox]):
        self.f = f
        self.singular = singular
        self.points: list[np.ndarray] = []
        self.weights: list[np.ndarray] = []
        self.pending = 0
        self.total = 0.0
        self.abs_total = 0.0
        self.evaluations = 0

    def add(self, points: np.ndarray, weight: float) -> None:
        self.points.append(points)
        self.weights.append(np.full(len(points), weight))
        self.pending += len(points)
        if self.pending >= _CHUNK_POINTS:
            self.flush()

    def flush(self) -> None:
        if not self.points:
            return
        pts = np.concatenate(self.points)
        wts = np.concatenate(self.weights)
        self.points, self.weights, self.pending = [], [], 0
        values = np.asarray(self.f(pts), dtype=float).reshape(len(pts))
        bad = ~np.isfinite(values)
        if bad.any():
            allowed = _inside_any(pts[bad], self.singular)
            if not allowed.all():
                where = pts[bad][~allowed][0]
                raise NumericError(f"non-finite integrand sample at theta={where.tolist()}")
            values = np.where(bad, 0.0, values)
        self.total += float(np.dot(values, wts))
        self.abs_total += float(np.dot(np.abs(values), wts))
        self.evaluations += len(pts)


def _midpoints(lo: np.ndarray, hi: np.ndarray, counts: Sequence[int]) -> np.ndarray:
    axes = [lo[k] + (np.arange(n) + 0.5) * (hi[k] - lo[k]) / n for k, n in enumerate(counts)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


def integrate_torus(f: Integrand, spec: QuadratureSpec) -> QuadratureResult:
    """
    Integrate f over [-π, π]^d (or spec.region).

    Args:
        f: Vectorized integrand mapping points of shape (n, d) to values (n,)
        spec: Resolution, tolerance and region boxes

    Returns:
        QuadratureResult; converged=False when the levels ran out first

    Raises:
        NumericError: Non-finite sample outside the declared singular boxes
    """
    lo, hi = _region_bounds(spec)
    singular = spec.boxes_with_role(BoxRole.SINGULAR)
    leaves: list[tuple[np.ndarray, np.ndarray]] = []
    for p_lo, p_hi in _panels(spec, lo, hi):
        _refine(p_lo, p_hi, singular, spec.max_depth, leaves)

    if not leaves:
        return QuadratureResult(value=0.0, error_estimate=0.0, converged=True, evaluations=0)

    base_counts = [
        [max(1, math.ceil(spec.resolution * (b - a) / TWO_PI - 1e-9)) for a, b in zip(l_lo, l_hi)]
        for l_lo, l_hi in leaves
    ]

    table: list[list[float]] = []
    evaluations = 0
    best = math.nan
    error = math.inf
    converged = False
    for level in range(spec.max_levels):
        factor = 2**level
        level_points = sum(math.prod(c) * factor ** spec.dimension for c in base_counts)
        if level_points > _MAX_LEVEL_POINTS:
            logger.warning("Quadrature point budget reached", level=level, points=level_points)
            break
        acc = _Accumulator(f, singular)
        for (l_lo, l_hi), counts in zip(leaves, base_counts):
            scaled = [n * factor for n in counts]
            volume = float(np.prod(l_hi - l_lo))
            acc.add(_midpoints(l_lo, l_hi, scaled), volume / math.prod(scaled))
        acc.flush()
        evaluations += acc.evaluations

        row = [acc.total]
        for k in range(1, min(level, len(spec.error_exponents)) + 1):
            ratio = 2.0 ** spec.error_exponents[k - 1]
            row.append(row[k - 1] + (row[k - 1] - table[level - 1][k - 1]) / (ratio - 1.0))
        table.append(row)

        if level >= 1:
            previous = table[level - 1][-1]
            error = abs(row[-1] - previous)
            scale = max(abs(row[-1]), acc.abs_total)
            best = row[-1]
            if error <= spec.tolerance * scale or scale == 0.0:
                converged = True
                break
        else:
            best = row[-1]

    if not converged:
        logger.warning("Torus quadrature unconverged", estimate=best, error=error)
    return QuadratureResult(
        value=float(best),
        error_estimate=float(error if math.isfinite(error) else abs(best)),
        converged=converged,
        evaluations=evaluations,
    )


# =============================================================================
# Pyramid (radial) integrator
# =============================================================================

def _u_breakpoints(
    radial: Sequence[float], axis_breaks: Sequence[float], dimension: int
) -> list[float]:
    """Values of u (per axis) where the t-interval structure changes."""
    pi = math.pi
    points = {0.0}
    for beta in axis_breaks:
        if beta < pi:
            points.add(beta)
    if dimension == 2:
        for r in radial:
            if pi < r < pi * math.sqrt(2.0):
                points.add(math.sqrt(r * r - pi * pi))
            for beta in axis_breaks:
                if r > beta:
                    points.add(beta * pi / math.sqrt(r * r - beta * beta))
                    points.add(math.sqrt(max((r * pi / beta) ** 2 - pi * pi, 0.0)))
        for b1 in axis_breaks:
            for b2 in axis_breaks:
                if b1 != b2:
                    points.add(pi * b1 / b2)
    sym = {p for p in points if 0.0 <= p < pi} | {-p for p in points if 0.0 < p < pi}
    return sorted(sym | {-pi, pi})


def _composite_nodes(breaks: Sequence[float], order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = gauss_legendre(order)
    xs, ws = [], []
    for a, b in zip(breaks, breaks[1:]):
        if b <= a:
            continue
        half = 0.5 * (b - a)
        xs.append(a + half * (nodes + 1.0))
        ws.append(half * weights)
    return np.concatenate(xs), np.concatenate(ws)


def _radial_pass_1d(
    f: Integrand,
    r_min: float,
    r_max: float,
    radial: Sequence[float],
    order: int,
    origin_panels: int,
) -> tuple[float, float, int]:
    pi = math.pi
    upper = min(pi, r_max)
    if r_min >= upper:
        return 0.0, 0.0, 0
    marks = sorted({r_min, upper} | {r for r in radial if r_min < r < upper})
    nodes, weights = gauss_legendre(order)
    xs, ws = [], []
    for a, b in zip(marks, marks[1:]):
        pieces = [(a, b)]
        if a == 0.0:
            pieces = [(b * 2.0 ** (-k - 1), b * 2.0**-k) for k in range(origin_panels)]
            pieces.append((0.0, b * 2.0**-origin_panels))
        for lo, hi in pieces:
            half = 0.5 * (hi - lo)
            xs.append(lo + half * (nodes + 1.0))
            ws.append(half * weights)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    pts = np.concatenate([x, -x])[:, None]
    vals = np.asarray(f(pts), dtype=float).reshape(-1)
    if not np.all(np.isfinite(vals)):
        raise NumericError("non-finite integrand sample in radial quadrature")
    ww = np.concatenate([w, w])
    return float(vals @ ww), float(np.abs(vals) @ ww), len(pts)


def _radial_pass(
    f: Integrand,
    dimension: int,
    r_min: float,
    r_max: float,
    radial: Sequence[float],
    axis_breaks: Sequence[float],
    order: int,
    origin_panels: int,
) -> tuple[float, float, int]:
    d = dimension
    if d == 1:
        marks = list(radial) + list(axis_breaks)
        return _radial_pass_1d(f, r_min, r_max, marks, order, origin_panels)

    pi = math.pi
    u_axis, u_w = _composite_nodes(_u_breakpoints([r_min, r_max, *radial], axis_breaks, d), order)
    mesh = np.meshgrid(*([u_axis] * (d - 1)), indexing="ij")
    u = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*([u_w] * (d - 1)), indexing="ij")
    u_weight = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=1)

    rho = np.sqrt(pi * pi + np.sum(u * u, axis=1))
    t_lo = r_min / rho
    t_hi = np.minimum(1.0, r_max / rho) if math.isfinite(r_max) else np.ones_like(rho)
    t_hi = np.maximum(t_hi, t_lo)
    abs_w = np.concatenate([np.full((len(u), 1), pi), np.abs(u)], axis=1)

    candidates = [r / rho for r in radial]
    for beta in axis_breaks:
        with np.errstate(divide="ignore"):
            candidates.extend(beta / abs_w[:, b] for b in range(d))
    if candidates:
        cand = np.stack(candidates, axis=1)
        cand = np.clip(np.nan_to_num(cand, posinf=2.0), t_lo[:, None], t_hi[:, None])
    else:
        cand = np.empty((len(u), 0))
    marks = np.sort(np.concatenate([t_lo[:, None], cand, t_hi[:, None]], axis=1), axis=1)

    starts = marks[:, :-1]
    ends = marks[:, 1:]
    if r_min == 0.0:
        first_end = ends[:, :1]
        k = np.arange(origin_panels)
        graded_lo = np.concatenate(
            [first_end * 2.0 ** (-k - 1), np.zeros((len(u), 1))], axis=1
        )
        graded_hi = np.concatenate(
            [first_end * 2.0 ** (-k), first_end * 2.0 ** (-origin_panels)], axis=1
        )
        starts = np.concatenate([graded_lo, starts[:, 1:]], axis=1)
        ends = np.concatenate([graded_hi, ends[:, 1:]], axis=1)

    nodes, weights = gauss_legendre(order)
    half = 0.5 * (ends - starts)
    t = starts[:, :, None] + half[:, :, None] * (nodes[None, None, :] + 1.0)
    t_weight = half[:, :, None] * weights[None, None, :]
    jac = pi * t ** (d - 1)

    total = 0.0
    abs_total = 0.0
    evaluations = 0
    per_u = t.shape[1] * t.shape[2]
    step = max(1, _CHUNK_POINTS // max(per_u, 1))
    for axis in range(d):
        for sign in (-1.0, 1.0):
            w_full = np.empty((len(u), d))
            w_full[:, axis] = sign * pi
            others = [b for b in range(d) if b != axis]
            w_full[:, others] = u
            for start in range(0, len(u), step):
                sl = slice(start, start + step)
                pts = t[sl, :, :, None] * w_full[sl, None, None, :]
                vals = np.asarray(f(pts.reshape(-1, d)), dtype=float).reshape(t[sl].shape)
                if not np.all(np.isfinite(vals)):
                    raise NumericError("non-finite integrand sample in radial quadrature")
                weight = u_weight[sl, None, None] * t_weight[sl] * jac[sl]
                total += float(np.sum(vals * weight))
                abs_total += float(np.sum(np.abs(vals) * weight))
                evaluations += vals.size
    return total, abs_total, evaluations


def integrate_radial(
    f: Integrand,
    dimension: int,
    *,
    r_min: float = 0.0,
    r_max: float = math.inf,
    radial_breaks: Sequence[float] = (),
    axis_breaks: Sequence[float] = (),
    tolerance: float = 1e-10,
    order: int = 16,
    max_order: int | None = None,
    origin_panels: int = 24,
) -> QuadratureResult:
    """
    Integrate f over {x ∈ [-π, π]^d : r_min ≤ ‖x‖₂ ≤ r_max}.

    Args:
        f: Vectorized integrand on points of shape (n, d)
        dimension: d
        r_min: Inner radius (0 integrates through the origin with graded panels)
        r_max: Outer radius (inf for the whole torus)
        radial_breaks: Radii across which f may jump
        axis_breaks: Offsets β such that f may jump across the planes |x_b| = β
        tolerance: Relative error target
        order: Starting Gauss-Legendre order (doubled until converged)
        max_order: Largest order tried
        origin_panels: Graded panels toward the origin

    Returns:
        QuadratureResult
    """
    if dimension < 1:
        raise DomainError("dimension must be positive")
    if r_min < 0 or r_max <= r_min:
        raise DomainError("need 0 <= r_min < r_max")
    if max_order is None:
        max_order = {1: 4096, 2: 512}.get(dimension, 64)

    previous: float | None = None
    evaluations = 0
    error = math.inf
    value = math.nan
    n = order
    while n <= max_order:
        value, abs_value, used = _radial_pass(
            f, dimension, r_min, r_max, radial_breaks, axis_breaks, n, origin_panels
        )
        evaluations += used
        if previous is not None:
            error = abs(value - previous)
            scale = max(abs(value), abs_value)
            if error <= tolerance * scale or scale == 0.0:
                return QuadratureResult(
                    value=value, error_estimate=error, converged=True, evaluations=evaluations
                )
        previous = value
        n *= 2

    logger.warning("Radial quadrature unconverged", estimate=value, error=error, order=n // 2)
    return QuadratureResult(
        value=value,
        error_estimate=error if math.isfinite(error) else abs(value),
        converged=False,
        evaluations=evaluations,
    )


# =============================================================================
# Polar rule on a ball
# =============================================================================

def _ball_pass(
    f: Integrand, dimension: int, radius: float, radial_breaks: Sequence[float], order: int
) -> tuple[float, float, int]:
    marks = sorted({0.0, radius} | {r for r in radial_breaks if 0.0 < r < radius})
    r, w_r = _composite_nodes(marks, order)
    if dimension == 1:
        pts = np.concatenate([r, -r])[:, None]
        weights = np.concatenate([w_r, w_r])
    elif dimension == 2:
        phi = TWO_PI * np.arange(2 * order) / (2 * order)
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        pts = np.stack([(rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()], axis=-1)
        weights = (w_r[:, None] * r[:, None] * np.full(phi.shape, TWO_PI / len(phi))).ravel()
    else:
        u, w_u = gauss_legendre(order)
        phi = TWO_PI * np.arange(2 * order) / (2 * order)
        rr, uu, pp = np.meshgrid(r, u, phi, indexing="ij")
        s = np.sqrt(1.0 - uu * uu)
        pts = np.stack(
            [(rr * s * np.cos(pp)).ravel(), (rr * s * np.sin(pp)).ravel(), (rr * uu).ravel()],
            axis=-1,
        )
        weights = (
            (w_r * r * r)[:, None, None] * w_u[None, :, None] * (TWO_PI / len(phi))
        ) * np.ones(pp.shape)
        weights = weights.ravel()
    vals = np.asarray(f(pts), dtype=float).reshape(-1)
    if not np.all(np.isfinite(vals)):
        raise NumericError("non-finite integrand sample in ball quadrature")
    return float(vals @ weights), float(np.abs(vals) @ weights), len(pts)


def integrate_ball(
    f: Integrand,
    dimension: int,
    radius: float,
    *,
    tolerance: float = 1e-10,
    radial_breaks: Sequence[float] = (),
    order: int = 16,
    max_order: int = 256,
) -> QuadratureResult:
    """
    Integrate f over the centered Euclidean ball of a given radius in R^d, d ≤ 3.

    Polar coordinates: Gauss-Legendre in r (split at radial_breaks) and in
    cos θ for d = 3, trapezoid in the periodic angle φ.
    """
    if dimension not in (1, 2, 3):
        raise DomainError("integrate_ball supports d <= 3")
    if radius <= 0:
        raise DomainError("ball radius must be positive")

    previous: float | None = None
    evaluations = 0
    value = math.nan
    error = math.inf
    n = order
    while n <= max_order:
        value, abs_value, used = _ball_pass(f, dimension, radius, radial_breaks, n)
        evaluations += used
        if previous is not None:
            error = abs(value - previous)
            if error <= tolerance * max(abs(value), abs_value) or abs_value == 0.0:
                return QuadratureResult(
                    value=value, error_estimate=error, converged=True, evaluations=evaluations
                )
        previous = value
        n *= 2
    logger.warning("Ball quadrature unconverged", estimate=value, error=error)
    return QuadratureResult(
        value=value,
        error_estimate=error if math.isfinite(error) else abs(value),
        converged=False,
        evaluations=evaluations,
    )
