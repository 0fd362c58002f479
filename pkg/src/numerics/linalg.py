"""
Dense Linear Algebra

Log-determinants of positive-semidefinite covariance matrices.
"""

import math

import numpy as np
import structlog
from scipy import linalg
from scipy.linalg import lapack

from src.models.errors import InputValidationError, NumericError
from src.models.values import ExtendedReal

logger = structlog.get_logger(__name__)

SYMMETRY_TOLERANCE = 1e-10
# Eigenvalues below this multiple of the largest are treated as zero.
_RANK_TOLERANCE = 1e-12


def check_symmetric(matrix: np.ndarray) -> np.ndarray:
    """Return matrix as a float array, or raise if it is not square and symmetric."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputValidationError(f"expected a square matrix, got shape {m.shape}")
    scale = max(float(np.max(np.abs(m))) if m.size else 0.0, 1e-300)
    asymmetry = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise InputValidationError(
            f"matrix is not symmetric: relative asymmetry {asymmetry / scale:.3g}"
        )
    return m


def log_det_psd(matrix: np.ndarray, jitter: float = 0.0) -> ExtendedReal:
    """
    log det(M + jitter·I) for a symmetric positive-semidefinite M.

    A Cholesky factorization is tried first. When it fails the spectrum
    decides: a singular PSD matrix without jitter gives the -inf sentinel,
    a matrix with a clearly negative eigenvalue is reported as indefinite,
    and a jittered matrix that is positive definite but numerically
    rank-deficient falls back to the sum of log-eigenvalues.

    Args:
        matrix: Symmetric matrix (relative asymmetry ≤ 1e-10)
        jitter: Nonnegative diagonal shift

    Returns:
        ExtendedReal log-determinant

    Raises:
        InputValidationError: Non-square or asymmetric input, negative jitter
        NumericError: Indefinite input; pivot names the failing leading minor
    """
    if jitter < 0:
        raise InputValidationError("jitter must be nonnegative")
    m = check_symmetric(matrix)
    n = m.shape[0]
    if n == 0:
        return ExtendedReal.finite(0.0)
    shifted = m + jitter * np.eye(n) if jitter else m

    factor, info = lapack.dpotrf(shifted, lower=1, clean=1)
    if info == 0:
        return ExtendedReal.finite(2.0 * float(np.sum(np.log(np.diag(factor)))))
    if info < 0:
        raise NumericError(f"dpotrf rejected argument {-info}")

    eigenvalues = linalg.eigvalsh(m)
    largest = max(float(eigenvalues[-1]), 0.0)
    floor = _RANK_TOLERANCE * max(largest, 1.0) * n
    smallest = float(eigenvalues[0])
    if smallest < -floor:
        raise NumericError(
            f"matrix is indefinite: Cholesky failed at pivot {info - 1}, "
            f"smallest eigenvalue {smallest:.3g}",
            pivot=info - 1,
        )
    if jitter == 0.0 and smallest <= floor:
        logger.debug("Singular PSD matrix", size=n, smallest=smallest)
        return ExtendedReal.neg_inf()
    # Rounding residue below the floor is a zero eigenvalue of M.
    value = float(np.sum(np.log(np.where(eigenvalues <= floor, 0.0, eigenvalues) + jitter)))
    if not math.isfinite(value):
        raise NumericError("log-determinant is not finite")
    return ExtendedReal.finite(value)
