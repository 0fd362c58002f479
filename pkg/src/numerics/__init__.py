"""
Numerical Kernels

- bessel: J_ν for integer and half-integer ν, ball transforms
- quadrature: torus, pyramid and ball integrators
- linalg: PSD log-determinants
"""

from src.numerics.bessel import (
    asymptotic_remainder_bound,
    ball_transform,
    bessel_j,
    leading_asymptotic,
)
from src.numerics.linalg import check_symmetric, log_det_psd
from src.numerics.quadrature import (
    gauss_legendre,
    integrate_ball,
    integrate_radial,
    integrate_torus,
    torus_volume,
)

__all__ = [
    "asymptotic_remainder_bound",
    "ball_transform",
    "bessel_j",
    "check_symmetric",
    "gauss_legendre",
    "integrate_ball",
    "integrate_radial",
    "integrate_torus",
    "leading_asymptotic",
    "log_det_psd",
    "torus_volume",
]
