"""
Analysis Engine

Core components:
- spectral_models: structure function families, kernels, σ² limits
- sampler: spectral synthesis of Gaussian fields on the torus
- geometry: windows, local masses, indicator transforms
- fluctuations: spectral and direct variances, box covariances, scans
- moments: partition algebra, k-statistics, CLT diagnostic
- entropy: covariance matrices, Gaussian entropy, Szegő limits
"""

from src.engine.entropy import covariance_matrix, entropy_scan, gaussian_entropy, szego_limit
from src.engine.fluctuations import (
    ball_grid_decomposition,
    covariance_boxes,
    covariance_grid,
    covariance_limit,
    exponent_scan,
    neighbourhood_covariance_sum,
    predicted_exponents,
    theta_ball,
    theta_scan,
    variance_direct,
    variance_monte_carlo,
    variance_spectral,
)
from src.engine.geometry import (
    ball_transform_direct,
    bounding_box,
    indicator_ft,
    indicator_mask,
    lattice_points,
    local_mass,
    point_count,
)
from src.engine.moments import (
    clt_scan,
    correlations_from_truncated,
    empirical_cumulants,
    gaussian_truncated_partial_sums,
    joint_cumulant,
    predicted_cumulant_exponent,
    set_partitions,
    truncated_from_correlations,
)
from src.engine.sampler import (
    empirical_kernel,
    marginal_kurtosis,
    periodized_kernel,
    sample_batch,
    sample_gaussian_field,
    transform_field,
)
from src.engine.spectral_models import (
    covariance_kernel,
    evaluate,
    gap_fraction,
    integrate_spectrum,
    make_structure_function,
    separable_factors,
    sigma_sq_d,
    sigma_sq_limit,
)

__all__ = [
    # Spectral models
    "covariance_kernel",
    "evaluate",
    "gap_fraction",
    "integrate_spectrum",
    "make_structure_function",
    "separable_factors",
    "sigma_sq_d",
    "sigma_sq_limit",
    # Sampler
    "empirical_kernel",
    "marginal_kurtosis",
    "periodized_kernel",
    "sample_batch",
    "sample_gaussian_field",
    "transform_field",
    # Geometry
    "ball_transform_direct",
    "bounding_box",
    "indicator_ft",
    "indicator_mask",
    "lattice_points",
    "local_mass",
    "point_count",
    # Fluctuations
    "ball_grid_decomposition",
    "covariance_boxes",
    "covariance_grid",
    "covariance_limit",
    "exponent_scan",
    "neighbourhood_covariance_sum",
    "predicted_exponents",
    "theta_ball",
    "theta_scan",
    "variance_direct",
    "variance_monte_carlo",
    "variance_spectral",
    # Moments
    "clt_scan",
    "correlations_from_truncated",
    "empirical_cumulants",
    "gaussian_truncated_partial_sums",
    "joint_cumulant",
    "predicted_cumulant_exponent",
    "set_partitions",
    "truncated_from_correlations",
    # Entropy
    "covariance_matrix",
    "entropy_scan",
    "gaussian_entropy",
    "szego_limit",
]
