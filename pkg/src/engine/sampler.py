"""
Sampler

Exact spectral synthesis of stationary Gaussian fields on the torus (Z/NZ)^d.

A real white-noise array W is filtered in Fourier space by √S(2πk/N):
X = IFFT(FFT(W)·√S). The circulant covariance of X is then exactly
K_N(j) = N^{-d} Σ_k S(2πk/N) e^{2πik·j/N}, self-conjugate modes included,
because the filter is real and even.

Every sample owns a Philox stream keyed by (master seed, sample index), so
batches are identical for any worker count and any order of generation.
"""

import math
from collections.abc import Callable, Sequence

import numpy as np
import structlog
from joblib import Parallel, delayed
from scipy import fft as sp_fft
from scipy import stats

from src.config import get_settings
from src.engine.spectral_models import spectrum_values
from src.models.errors import (
    DegenerateInputError,
    DomainError,
    InputValidationError,
    ResourceError,
    UsageError,
)
from src.models.field import FieldSample, TransformKind
from src.models.kernel import CovarianceKernel
from src.models.reports import Estimate
from src.models.spectrum import StructureFunction

logger = structlog.get_logger(__name__)

# Working arrays per sample, in multiples of N^d doubles.
_WORKSPACE_FACTOR = 4
_NEGATIVE_SLACK = 1e-12


def make_generator(seed: int, stream: int) -> np.random.Generator:
    """Philox generator for one sample of a master seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _check_torus(S: StructureFunction, side: int) -> None:
    if side < 8 or side % 2:
        raise DomainError(f"torus side must be even and >= 8, got {side}")
    need = _WORKSPACE_FACTOR * 8 * side**S.dimension
    if need > get_settings().memory_budget_bytes:
        raise ResourceError(
            f"torus side {side} in d={S.dimension} needs {need / 2**20:.0f} MiB, over the memory budget"
        )


def spectral_grid(S: StructureFunction, side: int, half: bool = False) -> np.ndarray:
    """
    S(2πk/N) on the FFT frequency grid.

    Args:
        S: Structure function
        side: Torus side N
        half: Only the nonnegative frequencies of the last axis (rfft layout)
    """
    d = S.dimension
    axes = [2.0 * math.pi * sp_fft.fftfreq(side) for _ in range(d)]
    if half:
        axes[-1] = 2.0 * math.pi * sp_fft.rfftfreq(side)
    shape = tuple(len(a) for a in axes)
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    values = spectrum_values(S, points).reshape(shape)
    smallest = float(values.min())
    if smallest < -_NEGATIVE_SLACK:
        raise InputValidationError(f"structure function is negative on the frequency grid ({smallest:.3g})")
    return np.maximum(values, 0.0)


def sample_gaussian_field(
    S: StructureFunction,
    side: int,
    seed: int,
    stream: int = 0,
    filter_half: np.ndarray | None = None,
) -> FieldSample:
    """
    One Gaussian field with circulant covariance K_N.

    Args:
        S: Structure function
        side: Torus side N (even, ≥ 8)
        seed: Master seed
        stream: Sample index within the master seed
        filter_half: Precomputed √S on the rfft grid (reused across a batch)

    Raises:
        DomainError: Odd or too small N
        ResourceError: N^d beyond the memory budget
        InputValidationError: Negative S at a grid frequency
    """
    _check_torus(S, side)
    d = S.dimension
    if filter_half is None:
        filter_half = np.sqrt(spectral_grid(S, side, half=True))
    rng = make_generator(seed, stream)
    noise = rng.standard_normal((side,) * d)
    values = sp_fft.irfftn(sp_fft.rfftn(noise) * filter_half, s=noise.shape)
    return FieldSample(
        dimension=d,
        side=side,
        values=values,
        seed=seed,
        stream=stream,
        structure_id=S.identifier,
    )


def transform_field(field: FieldSample, kind: TransformKind) -> FieldSample:
    """
    Pointwise sign or cube, recentred and rescaled to mean 0 and variance 1.

    Raises:
        UsageError: The field was already transformed, or kind is NONE
        DegenerateInputError: The transformed values have no variance
    """
    if field.transform != TransformKind.NONE:
        raise UsageError(f"field already carries transform {field.transform.value!r}")
    x = field.array
    if kind == TransformKind.SIGN:
        y = np.sign(x)
    elif kind == TransformKind.CUBE:
        y = x**3
    else:
        raise UsageError("transform kind must be sign or cube")
    y = y - y.mean()
    scale = float(np.sqrt(np.mean(y * y)))
    if not scale > 0.0:
        raise DegenerateInputError("transformed field has zero variance")
    return field.model_copy(update={"values": y / scale, "transform": kind})


def sample_batch(
    S: StructureFunction,
    side: int,
    seed: int,
    count: int,
    transform: TransformKind = TransformKind.NONE,
    workers: int | None = None,
    start: int = 0,
) -> list[FieldSample]:
    """Fields for streams start..start+count-1, in stream order."""
    return sample_statistics(S, side, seed, count, _identity, transform, workers, start)


def _identity(field: FieldSample) -> FieldSample:
    return field


def _sample_chunk(
    S: StructureFunction,
    side: int,
    seed: int,
    streams: Sequence[int],
    statistic: Callable[[FieldSample], object],
    transform: TransformKind,
) -> list[object]:
    filter_half = np.sqrt(spectral_grid(S, side, half=True))
    out = []
    for stream in streams:
        field = sample_gaussian_field(S, side, seed, stream, filter_half)
        if transform != TransformKind.NONE:
            field = transform_field(field, transform)
        out.append(statistic(field))
    return out


def sample_statistics(
    S: StructureFunction,
    side: int,
    seed: int,
    count: int,
    statistic: Callable[[FieldSample], object],
    transform: TransformKind = TransformKind.NONE,
    workers: int | None = None,
    start: int = 0,
) -> list:
    """
    Apply statistic to count fresh fields without holding them all.

    Chunks of streams run in joblib workers; results come back in stream
    order, so the output does not depend on the worker count.
    """
    if count < 1:
        raise UsageError("count must be positive")
    _check_torus(S, side)
    n_jobs = workers if workers is not None else get_settings().n_jobs
    streams = list(range(start, start + count))
    if n_jobs == 1 or count < 8:
        return _sample_chunk(S, side, seed, streams, statistic, transform)
    pieces = max(1, min(count, 4 * (n_jobs if n_jobs > 0 else 8)))
    chunks = [list(c) for c in np.array_split(streams, pieces) if len(c)]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_sample_chunk)(S, side, seed, [int(s) for s in chunk], statistic, transform)
        for chunk in chunks
    )
    logger.debug("Sampled batch", count=count, side=side, chunks=len(chunks))
    return [item for chunk in results for item in chunk]


def _lag_window(table: np.ndarray, radius: int) -> np.ndarray:
    side = table.shape[0]
    lags = np.arange(-radius, radius + 1) % side
    return table[np.ix_(*([lags] * table.ndim))]


def periodized_kernel(S: StructureFunction, side: int, radius: int) -> CovarianceKernel:
    """Exact lag table K_N(j) of the torus sampler."""
    _check_torus(S, side)
    if 2 * radius >= side:
        raise UsageError(f"lag radius {radius} needs a torus side above {2 * radius}")
    table = sp_fft.ifftn(spectral_grid(S, side)).real
    return CovarianceKernel(
        dimension=S.dimension,
        radius=radius,
        values=_lag_window(table, radius),
        source=S.identifier,
        method=f"periodized-N{side}",
    )


def _autocovariance(field: FieldSample) -> np.ndarray:
    x = field.array
    spectrum = sp_fft.rfftn(x)
    return sp_fft.irfftn(spectrum * np.conj(spectrum), s=x.shape) / x.size


def empirical_kernel(fields: Sequence[FieldSample], radius: int) -> CovarianceKernel:
    """
    Torus-average covariance per lag, averaged over fields, with standard errors.

    Raises:
        UsageError: Fewer than two fields, mixed provenance, or a radius beyond N/2
    """
    if len(fields) < 2:
        raise UsageError("empirical_kernel needs at least two fields")
    provenance = fields[0].provenance
    if any(f.provenance != provenance for f in fields[1:]):
        raise UsageError("fields differ in structure function, side or transform")
    side = fields[0].side
    if 2 * radius >= side:
        raise UsageError(f"lag radius {radius} needs a torus side above {2 * radius}")
    windows = np.stack([_lag_window(_autocovariance(f), radius) for f in fields])
    mean = windows.mean(axis=0)
    stderr = windows.std(axis=0, ddof=1) / math.sqrt(len(fields))
    return CovarianceKernel(
        dimension=fields[0].dimension,
        radius=radius,
        values=mean,
        source=fields[0].structure_id,
        method="empirical",
        error_estimate=float(stderr.max()),
        standard_errors=stderr,
    )


def marginal_kurtosis(fields: Sequence[FieldSample]) -> Estimate:
    """Pearson kurtosis of the marginal, with the across-field standard error."""
    if len(fields) < 2:
        raise UsageError("marginal_kurtosis needs at least two fields")
    per_field = np.array([stats.kurtosis(f.array.ravel(), fisher=False) for f in fields])
    return Estimate(
        value=float(per_field.mean()),
        error=float(per_field.std(ddof=1) / math.sqrt(len(fields))),
        method="monte-carlo",
    )
