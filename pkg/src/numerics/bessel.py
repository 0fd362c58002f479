r"""
Bessel functions of the first kind for integer and half-integer order.

Three evaluation routes, selected per argument:

- power series :math:`J_\nu(z) = \sum_m (-1)^m (z/2)^{2m+\nu} / (m!\,\Gamma(m+\nu+1))`
  for :math:`z < 12` (any order),
- closed trigonometric forms for half-integer orders, via the spherical
  Bessel functions :math:`J_{n+1/2}(z) = \sqrt{2z/\pi}\, j_n(z)` with
  :math:`j_0 = \sin z / z` and the upward recurrence, used once :math:`z \ge n`,
- the Hankel expansion for integer orders and :math:`z \ge 12`,

.. math::
    J_\nu(z) = \sqrt{2/(\pi z)}\,\bigl(P \cos\omega - Q \sin\omega\bigr),
    \qquad \omega = z - \nu\pi/2 - \pi/4,

with :math:`P = \sum_k (-1)^k a_{2k}/z^{2k}`, :math:`Q = \sum_k (-1)^k a_{2k+1}/z^{2k+1}`
and :math:`a_k = \prod_{m=1}^{k} (4\nu^2 - (2m-1)^2) / (k!\, 8^k)`, summed up to
its smallest term. At :math:`z = 12` the truncation error is below 1e-10 for
orders up to 5/2; larger integer orders switch to the upward three-term
recurrence from :math:`J_0, J_1` when :math:`z \ge \nu`.

The leading term of the Hankel expansion has remainder bounded by
:math:`M z^{-3/2}`; :func:`asymptotic_remainder_bound` returns M.
"""

import math

import numpy as np

from src.models.errors import DomainError

SERIES_ASYMPTOTIC_SPLIT = 12.0
_SERIES_TERMS = 80
_HANKEL_TERMS = 60


def _validate_order(order: float) -> float:
    twice = 2.0 * float(order)
    if order < 0 or not math.isfinite(twice) or twice != round(twice):
        raise DomainError(f"unsupported Bessel order {order!r}: need 0, 1/2, 1, 3/2, ...")
    return float(order)


def _is_integer_order(order: float) -> bool:
    return float(order).is_integer()


def _series(order: float, z: np.ndarray) -> np.ndarray:
    half = z / 2.0
    term = half**order / math.gamma(order + 1.0)
    total = term.copy()
    minus_half_sq = -half * half
    for m in range(1, _SERIES_TERMS):
        term = term * minus_half_sq / (m * (m + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel_coefficients(order: float, count: int) -> list[float]:
    mu = 4.0 * order * order
    coefficients = [1.0]
    for k in range(1, count):
        coefficients.append(coefficients[-1] * (mu - (2 * k - 1) ** 2) / (8.0 * k))
    return coefficients


def _hankel(order: float, z: np.ndarray) -> np.ndarray:
    a = _hankel_coefficients(order, _HANKEL_TERMS)
    p = np.ones_like(z)
    q = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    previous = np.full(z.shape, np.inf)
    power = np.ones_like(z)
    for k in range(1, _HANKEL_TERMS):
        power = power / z
        term = a[k] * power
        magnitude = np.abs(term)
        # optimal truncation: stop at the smallest term of the asymptotic series
        active &= magnitude < previous
        previous = np.where(active, magnitude, previous)
        sign = -1.0 if (k // 2) % 2 else 1.0
        contribution = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p += contribution
        else:
            q += contribution
        if a[k] == 0.0 or not active.any():
            break
    omega = z - order * math.pi / 2.0 - math.pi / 4.0
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(omega) - q * np.sin(omega))


def _spherical(n: int, z: np.ndarray) -> np.ndarray:
    """J_{n+1/2}(z) through spherical Bessel functions; stable for z ≥ n."""
    j_prev = np.sin(z) / z
    if n == 0:
        j_curr = j_prev
    else:
        j_curr = np.sin(z) / z**2 - np.cos(z) / z
        for k in range(1, n):
            j_prev, j_curr = j_curr, (2 * k + 1) / z * j_curr - j_prev
    return np.sqrt(2.0 * z / math.pi) * j_curr


def _upward_integer(order: int, z: np.ndarray) -> np.ndarray:
    j_prev = _hankel(0.0, z)
    j_curr = _hankel(1.0, z)
    if order == 0:
        return j_prev
    for k in range(1, order):
        j_prev, j_curr = j_curr, (2.0 * k / z) * j_curr - j_prev
    return j_curr


def bessel_j(order: float, z: float | np.ndarray) -> float | np.ndarray:
    """
    Bessel function of the first kind J_order(z).

    Args:
        order: 0, 1/2, 1, 3/2, ...
        z: Nonnegative argument (scalar or array)

    Returns:
        J_order(z) with the shape of z

    Raises:
        DomainError: Negative or non-half-integer order, negative or non-finite z
    """
    nu = _validate_order(order)
    scalar = np.ndim(z) == 0
    x = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("Bessel argument must be finite and nonnegative")

    out = np.empty_like(x)
    if _is_integer_order(nu):
        n = int(nu)
        small = x < SERIES_ASYMPTOTIC_SPLIT
        if n <= 2:
            large = ~small
            series_mask = small
        else:
            large = (~small) & (x >= n)
            series_mask = ~large
        if series_mask.any():
            out[series_mask] = _series(nu, x[series_mask])
        if large.any():
            out[large] = _hankel(nu, x[large]) if n <= 2 else _upward_integer(n, x[large])
    else:
        n = int(nu - 0.5)
        closed = x >= max(1.0, float(n))
        if closed.any():
            out[closed] = _spherical(n, x[closed])
        if (~closed).any():
            out[~closed] = _series(nu, x[~closed])

    return float(out[0]) if scalar else out


def leading_asymptotic(order: float, z: float | np.ndarray) -> float | np.ndarray:
    """Leading Hankel term sqrt(2/(πz))·cos(z − νπ/2 − π/4)."""
    nu = _validate_order(order)
    x = np.asarray(z, dtype=float)
    value = np.sqrt(2.0 / (math.pi * x)) * np.cos(x - nu * math.pi / 2.0 - math.pi / 4.0)
    return float(value) if np.ndim(value) == 0 else value


def asymptotic_remainder_bound(order: float, z_min: float) -> float:
    """
    Constant M with |J_ν(z) − leading_asymptotic(ν, z)| ≤ M·z^{-3/2} for z ≥ z_min.

    Sums |a_k|·z_min^{1−k} up to the smallest term of the expansion at z_min and
    adds the first omitted term.
    """
    nu = _validate_order(order)
    if z_min <= 0:
        raise DomainError("z_min must be positive")
    a = _hankel_coefficients(nu, _HANKEL_TERMS)
    total = 0.0
    previous = math.inf
    for k in range(1, _HANKEL_TERMS):
        term = abs(a[k]) * z_min ** (1 - k)
        total += term
        if term == 0.0 or term >= previous:
            break
        previous = term
    return math.sqrt(2.0 / math.pi) * total


def ball_transform(dimension: int, radius: float, k: float | np.ndarray) -> float | np.ndarray:
    """
    Continuum Fourier transform of the centered Euclidean ball of a given radius.

    ∫_{‖x‖≤R} e^{-iξ·x} dx = (2π)^{d/2} R^{d/2} ‖ξ‖^{-d/2} J_{d/2}(R‖ξ‖), which is
    2 sin(Rk)/k in d = 1 and tends to the ball volume as k → 0.

    Args:
        dimension: d
        radius: R > 0
        k: ‖ξ‖ (scalar or array, nonnegative)
    """
    if radius <= 0:
        raise DomainError("ball radius must be positive")
    d = int(dimension)
    scalar = np.ndim(k) == 0
    kk = np.atleast_1d(np.asarray(k, dtype=float))
    volume = math.pi ** (d / 2.0) * radius**d / math.gamma(d / 2.0 + 1.0)
    out = np.full(kk.shape, volume)
    nonzero = kk > 0
    if nonzero.any():
        kn = kk[nonzero]
        out[nonzero] = (
            (2.0 * math.pi) ** (d / 2.0)
            * (radius / kn) ** (d / 2.0)
            * bessel_j(d / 2.0, radius * kn)
        )
    return float(out[0]) if scalar else out
