"""
Moments and Cumulants

Combinatorics of correlation functions and the CLT diagnostic for local
masses of balls.

- set partitions of {1..n} in canonical (restricted growth) order
- correlations ↔ truncated correlations by summing over partitions:
  ρ_n = Σ_π Π_B ρ^T_B and ρ^T_n = Σ_π (|π|-1)! (-1)^{|π|-1} Π_B ρ_B
- k-statistics with delete-one jackknife errors
- clt_scan: k3, k4 and the Kolmogorov-Smirnov distance of normalized
  ball masses across sampled fields
"""

import math
from collections.abc import Sequence
from functools import lru_cache, partial
from itertools import combinations

import numpy as np
import structlog
from scipy import stats

from src.engine.geometry import bounding_box, local_mass
from src.engine.sampler import sample_statistics
from src.engine.spectral_models import covariance_kernel
from src.models.correlation import MAX_ORDER, CorrelationTable, CumulantEstimate, CumulantEstimates
from src.models.domain import Domain
from src.models.errors import DomainError, GeometryError, UsageError
from src.models.field import FieldSample, TransformKind
from src.models.reports import ScanPoint, ScanReport
from src.models.spectrum import StructureFunction

logger = structlog.get_logger(__name__)

Partition = tuple[frozenset[int], ...]

MIN_CUMULANT_SAMPLES = 100
MAX_CUMULANT_ORDER = 4
MIN_CLT_REPLICATES = 1000
TORUS_TO_WINDOW = 8
# Asymptotic 95% critical value of the one-sample KS statistic, times √n.
_KS_CRITICAL = 1.358
# A sample is treated as lattice-valued when it has at most one atom per this many draws.
_LATTICE_ATOM_RATIO = 4


# =============================================================================
# Set partitions
# =============================================================================

@lru_cache(maxsize=None)
def set_partitions(n: int) -> tuple[Partition, ...]:
    """
    All partitions of {1, ..., n}, Bell(n) of them.

    Generated from restricted growth strings a_1 = 0, a_k ≤ 1 + max(a_1..a_{k-1})
    in lexicographic order; blocks are listed by their smallest element.

    Raises:
        DomainError: n outside 1..6
    """
    if not 1 <= n <= MAX_ORDER:
        raise DomainError(f"set partitions are available for 1 <= n <= {MAX_ORDER}, got {n}")
    out: list[Partition] = []

    def grow(prefix: list[int], top: int) -> None:
        if len(prefix) == n:
            blocks: list[set[int]] = [set() for _ in range(top + 1)]
            for element, label in enumerate(prefix, start=1):
                blocks[label].add(element)
            out.append(tuple(frozenset(b) for b in blocks))
            return
        for label in range(top + 2):
            grow(prefix + [label], max(top, label))

    grow([0], 0)
    return tuple(out)


def _partitions_of(block: frozenset[int]) -> list[Partition]:
    elements = sorted(block)
    relabel = dict(enumerate(elements, start=1))
    return [
        tuple(frozenset(relabel[e] for e in part) for part in partition)
        for partition in set_partitions(len(elements))
    ]


def _all_blocks(order: int) -> list[frozenset[int]]:
    universe = range(1, order + 1)
    return [frozenset(c) for size in range(1, order + 1) for c in combinations(universe, size)]


# =============================================================================
# Partition conversions
# =============================================================================

def truncated_from_correlations(table: CorrelationTable, block: frozenset[int] | None = None) -> float:
    """
    ρ^T on a block (default: the whole index set) from correlation values.

    Raises:
        UsageError: A block value needed by the sum is missing
    """
    target = block if block is not None else frozenset(range(1, table.order + 1))
    total = 0.0
    for partition in _partitions_of(target):
        k = len(partition)
        term = math.factorial(k - 1) * (-1) ** (k - 1)
        for part in partition:
            term *= table.block(part)
        total += term
    return total


def correlations_from_truncated(table: CorrelationTable, block: frozenset[int] | None = None) -> float:
    """
    ρ on a block from truncated correlation values, Σ_π Π_B ρ^T_B.

    Raises:
        UsageError: A block value needed by the sum is missing
    """
    target = block if block is not None else frozenset(range(1, table.order + 1))
    total = 0.0
    for partition in _partitions_of(target):
        term = 1.0
        for part in partition:
            term *= table.block(part)
        total += term
    return total


def to_truncated_table(table: CorrelationTable) -> CorrelationTable:
    """Truncated values on every block of a complete correlation table."""
    return CorrelationTable(
        order=table.order,
        points=table.points,
        values={b: truncated_from_correlations(table, b) for b in _all_blocks(table.order)},
    )


def to_correlation_table(table: CorrelationTable) -> CorrelationTable:
    """Correlation values on every block of a complete truncated table."""
    return CorrelationTable(
        order=table.order,
        points=table.points,
        values={b: correlations_from_truncated(table, b) for b in _all_blocks(table.order)},
    )


def moment_table(samples: np.ndarray) -> CorrelationTable:
    """Sample mixed moments E[Π_{b∈B} X_b] of the columns of an (m, n) array."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise UsageError("samples must be an (m, n) array")
    order = x.shape[1]
    values = {b: float(np.mean(np.prod(x[:, sorted(i - 1 for i in b)], axis=1))) for b in _all_blocks(order)}
    return CorrelationTable(order=order, values=values)


def joint_cumulant(samples: np.ndarray) -> float:
    """
    Joint cumulant of the columns of an (m, n) sample array.

    Uses the recursion on the first variable,
    m(A) = Σ_{T ⊆ A∖{a}} κ({a} ∪ T) m(A ∖ ({a} ∪ T)),
    so no partition enumeration is involved.
    """
    moments = moment_table(samples)
    cache: dict[frozenset[int], float] = {}

    def moment(block: frozenset[int]) -> float:
        return moments.block(block) if block else 1.0

    def kappa(block: frozenset[int]) -> float:
        if block in cache:
            return cache[block]
        first = min(block)
        rest = sorted(block - {first})
        value = moment(block)
        for size in range(len(rest)):
            for chosen in combinations(rest, size):
                head = frozenset((first, *chosen))
                value -= kappa(head) * moment(block - head)
        cache[block] = value
        return value

    return kappa(frozenset(range(1, moments.order + 1)))


# =============================================================================
# k-statistics
# =============================================================================

PowerSum = float | np.ndarray


def _k_statistics(
    s1: PowerSum, s2: PowerSum, s3: PowerSum, s4: PowerSum, n: int
) -> tuple[PowerSum, PowerSum, PowerSum, PowerSum]:
    """Mean and k2..k4 from power sums; arrays of sums give leave-one-out values."""
    k2 = (n * s2 - s1**2) / (n * (n - 1))
    k3 = (2 * s1**3 - 3 * n * s1 * s2 + n**2 * s3) / (n * (n - 1) * (n - 2))
    k4 = (
        -6 * s1**4
        + 12 * n * s1**2 * s2
        - 3 * n * (n - 1) * s2**2
        - 4 * n * (n + 1) * s1 * s3
        + n**2 * (n + 1) * s4
    ) / (n * (n - 1) * (n - 2) * (n - 3))
    return s1 / n, k2, k3, k4


def _jackknife_error(replicates: np.ndarray) -> float:
    n = len(replicates)
    return float(math.sqrt((n - 1) / n * np.sum((replicates - replicates.mean()) ** 2)))


def empirical_cumulants(samples: Sequence[float] | np.ndarray, max_order: int = MAX_CUMULANT_ORDER) -> CumulantEstimates:
    """
    Unbiased k-statistics k_1..k_max with delete-one jackknife standard errors.

    Power sums are taken about the sample mean; the leave-one-out values
    come from subtracting each sample's contribution.

    Raises:
        UsageError: Fewer than 100 samples
        DomainError: max_order outside 1..4
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = len(x)
    if n < MIN_CUMULANT_SAMPLES:
        raise UsageError(f"need at least {MIN_CUMULANT_SAMPLES} samples, got {n}")
    if not 1 <= max_order <= MAX_CUMULANT_ORDER:
        raise DomainError(f"max_order must lie in 1..{MAX_CUMULANT_ORDER}")
    if np.ptp(x) == 0.0:
        estimates = {r: CumulantEstimate(order=r, value=float(x[0]) if r == 1 else 0.0, stderr=0.0)
                     for r in range(1, max_order + 1)}
        return CumulantEstimates(n_samples=n, estimates=estimates)

    shift = float(x.mean())
    y = x - shift
    powers = [y**r for r in range(1, 5)]
    sums = [float(p.sum()) for p in powers]
    full = _k_statistics(*sums, n)
    leave_one = _k_statistics(*(s - p for s, p in zip(sums, powers)), n - 1)

    estimates = {}
    for r in range(1, max_order + 1):
        value = full[r - 1] + (shift if r == 1 else 0.0)
        estimates[r] = CumulantEstimate(order=r, value=float(value), stderr=_jackknife_error(leave_one[r - 1]))
    return CumulantEstimates(n_samples=n, estimates=estimates)


# =============================================================================
# Rates and certifiable sums
# =============================================================================

def predicted_cumulant_exponent(dimension: int, order: int) -> tuple[float, bool]:
    """
    Growth rate -(n d/2)(1 - 1/d - 2/n) of κ_n for the normalized ball mass.

    Returns:
        (rate, whether the rate is negative so κ_n → 0)
    """
    if dimension < 1 or order < 1:
        raise DomainError("dimension and order must be positive")
    rate = -(order * dimension / 2.0) * (1.0 - 1.0 / dimension - 2.0 / order)
    return rate, rate < 0.0


def gaussian_truncated_partial_sums(S: StructureFunction, radii: Sequence[int]) -> np.ndarray:
    """Σ_{‖j‖₂ ≤ R} |K(j)| for each R; the only nonzero truncated correlation of a Gaussian field."""
    if not radii or min(radii) < 0:
        raise DomainError("radii must be nonnegative and nonempty")
    kernel = covariance_kernel(S, int(max(radii)))
    lags = kernel.lag_vectors()
    norms = np.linalg.norm(lags, axis=1)
    weights = np.abs(kernel.table).ravel()
    return np.array([float(weights[norms <= R + 1e-12].sum()) for R in radii])


# =============================================================================
# CLT diagnostic
# =============================================================================

def _ball_masses(domains: Sequence[Domain], field: FieldSample) -> tuple[float, ...]:
    return tuple(local_mass(field, domain) for domain in domains)


def clt_torus_side(scales: Sequence[float]) -> int:
    """Smallest even torus side at least eight times the largest scale."""
    side = math.ceil(TORUS_TO_WINDOW * max(scales))
    return max(8, side + side % 2)


def ks_normal_distance(z: np.ndarray) -> float:
    """
    Kolmogorov-Smirnov distance of a standardized sample to N(0, 1).

    Lattice-valued samples (sign-transformed masses take values 2k/σ) are
    compared at the midpoints between atoms; a continuous CDF cannot follow
    the jumps and the plain statistic never drops below half an atom.
    """
    z = np.asarray(z, dtype=float)
    atoms, counts = np.unique(z, return_counts=True)
    if atoms.size < 2 or atoms.size > z.size // _LATTICE_ATOM_RATIO:
        return float(stats.kstest(z, "norm").statistic)
    steps = np.diff(atoms)
    h = float(steps.min())
    multiples = steps / h
    if not np.allclose(multiples, np.round(multiples), atol=1e-6):
        return float(stats.kstest(z, "norm").statistic)
    ecdf = np.cumsum(counts) / z.size
    return float(np.max(np.abs(ecdf - stats.norm.cdf(atoms + 0.5 * h))))


def clt_scan(
    S: StructureFunction,
    transform: TransformKind,
    scales: Sequence[float],
    replicates: int,
    seed: int,
    side: int | None = None,
    workers: int | None = None,
) -> ScanReport:
    """
    Normality diagnostic of ball masses across independently sampled fields.

    Steps:
    1. Sample replicates fields (optionally transformed) on a torus of side ≥ 8·max L
    2. Record Q over the centered ball of every scale in each field
    3. Standardize per scale and report k3, k4 with jackknife errors and
       the KS distance to N(0, 1)

    Raises:
        UsageError: Fewer than 1000 replicates or an empty grid
        GeometryError: Torus side below eight times the largest scale
    """
    if replicates < MIN_CLT_REPLICATES:
        raise UsageError(f"clt_scan needs at least {MIN_CLT_REPLICATES} replicates")
    grid = sorted(float(L) for L in scales)
    if not grid:
        raise UsageError("clt_scan needs a nonempty scale grid")
    n_side = side if side is not None else clt_torus_side(grid)
    if n_side < TORUS_TO_WINDOW * grid[-1]:
        raise GeometryError(
            f"torus side {n_side} is below {TORUS_TO_WINDOW} times the largest scale {grid[-1]}"
        )
    domains = [Domain.ball(L, S.dimension) for L in grid]
    for domain in domains:
        lo, hi = bounding_box(domain)
        if np.any(hi - lo + 1 >= n_side):
            raise GeometryError("ball does not fit in the torus")

    logger.info(
        "CLT scan started",
        identifier=S.identifier,
        transform=transform.value,
        replicates=replicates,
        side=n_side,
    )
    masses = np.asarray(
        sample_statistics(
            S, n_side, seed, replicates, partial(_ball_masses, domains), transform=transform, workers=workers
        ),
        dtype=float,
    )

    points = []
    ks_error = _KS_CRITICAL / math.sqrt(replicates)
    for column, L in enumerate(grid):
        q = masses[:, column]
        scale = float(q.std(ddof=1))
        z = (q - q.mean()) / scale if scale > 0 else q - q.mean()
        cumulants = empirical_cumulants(z)
        ks = ks_normal_distance(z)
        points.extend([
            ScanPoint(value=L, stat="k3", stat_value=cumulants[3].value, stat_err=cumulants[3].stderr, mode="monte-carlo"),
            ScanPoint(value=L, stat="k4", stat_value=cumulants[4].value, stat_err=cumulants[4].stderr, mode="monte-carlo"),
            ScanPoint(value=L, stat="ks", stat_value=ks, stat_err=ks_error, mode="monte-carlo"),
        ])
        logger.debug("CLT point", L=L, k3=cumulants[3].value, k4=cumulants[4].value, ks=ks)

    # Gaussian truncated correlations vanish beyond order two; transforms need the declaration.
    summable = transform == TransformKind.NONE or S.spec.assume_summable_truncated
    if not summable:
        logger.warning(
            "Summable truncated correlations not declared for a transformed field",
            identifier=S.identifier,
            transform=transform.value,
        )
    return ScanReport(
        scan_var="L",
        grid=grid,
        points=points,
        hypothesis_met=summable,
        metadata={
            "structure": S.identifier,
            "shape": "ball",
            "transform": transform.value,
            "replicates": replicates,
            "torus_side": n_side,
            "seed": seed,
        },
    )
