"""
Tests for structure function families and covariance kernels.

Tests cover:
- Normalization to unit variance
- Point evaluation and domain checks
- Kernel tables against closed forms
- Radial-power kernels in d ≥ 2 and the scaled Bessel function
- σ² limits and gap fractions
- Validation of tabulated and cosine-series input
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from src.engine.spectral_models import (
    covariance_kernel,
    evaluate,
    gap_fraction,
    integrate_spectrum,
    make_structure_function,
    scaled_bessel_i,
    separable_factors,
    sigma_sq_d,
    sigma_sq_limit,
)
from src.models.domain import IndicatorMode
from src.models.errors import DomainError, InputValidationError
from src.models.spectrum import CosineTerm, StructureFamily, StructureFunction, StructureFunctionSpec


# =============================================================================
# Construction
# =============================================================================

class TestMakeStructureFunction:
    """Tests for normalization and validation."""

    def test_stealthy_normalization(self, stealthy_1d: StructureFunction) -> None:
        assert stealthy_1d.normalization == pytest.approx(2.0)
        assert stealthy_1d.raw_mean == pytest.approx(0.5)

    def test_axes_stealthy_normalization(self, axes_stealthy_2d: StructureFunction) -> None:
        assert axes_stealthy_2d.normalization == pytest.approx(4.0)

    def test_white_noise_is_unnormalized(self, white_noise_2d: StructureFunction) -> None:
        assert white_noise_2d.normalization == 1.0

    def test_missing_delta_rejected(self) -> None:
        with pytest.raises(ValidationError):
            StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP)

    def test_delta_outside_open_interval_rejected(self) -> None:
        with pytest.raises(ValidationError):
            StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, delta=math.pi)

    def test_negative_cosine_series_rejected(self) -> None:
        spec = StructureFunctionSpec(
            family=StructureFamily.COSINE_SERIES,
            terms=(CosineTerm(frequency=(1,), amplitude=2.0),),
        )
        with pytest.raises(InputValidationError):
            make_structure_function(spec)

    def test_asymmetric_table_rejected(self) -> None:
        spec = StructureFunctionSpec(
            family=StructureFamily.TABULATED, table=(1.0, 2.0, 3.0, 4.0), table_size=4
        )
        with pytest.raises(InputValidationError):
            make_structure_function(spec)

    def test_negative_table_rejected(self) -> None:
        spec = StructureFunctionSpec(
            family=StructureFamily.TABULATED, table=(1.0, -1.0, 1.0, -1.0), table_size=4
        )
        with pytest.raises(InputValidationError):
            make_structure_function(spec)

    def test_table_normalized_by_its_mean(self) -> None:
        spec = StructureFunctionSpec(
            family=StructureFamily.TABULATED, table=(0.0, 2.0, 4.0, 2.0), table_size=4
        )
        S = make_structure_function(spec)
        assert S.normalization == pytest.approx(0.5)
        assert covariance_kernel(S, 0).center == pytest.approx(1.0)

    def test_identifier_is_deterministic(self) -> None:
        spec = StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, delta=1.0)
        assert make_structure_function(spec).identifier == make_structure_function(spec).identifier
        assert "stealthy-gap" in spec.describe()


# =============================================================================
# Evaluation
# =============================================================================

class TestEvaluate:
    """Tests for evaluate."""

    def test_stealthy_values(self, stealthy_1d: StructureFunction) -> None:
        assert evaluate(stealthy_1d, 0.1) == 0.0
        assert evaluate(stealthy_1d, 2.0) == pytest.approx(2.0)

    def test_symmetric(self, radial_power_1d: StructureFunction) -> None:
        theta = np.linspace(0.01, math.pi, 17)[:, None]
        np.testing.assert_allclose(evaluate(radial_power_1d, theta), evaluate(radial_power_1d, -theta))

    def test_vector_point_in_two_dimensions(self, axes_stealthy_2d: StructureFunction) -> None:
        assert evaluate(axes_stealthy_2d, (2.0, 2.0)) == pytest.approx(4.0)
        assert evaluate(axes_stealthy_2d, (2.0, 0.5)) == 0.0

    def test_outside_fundamental_domain(self, stealthy_1d: StructureFunction) -> None:
        with pytest.raises(DomainError):
            evaluate(stealthy_1d, 4.0)


# =============================================================================
# Kernels
# =============================================================================

class TestCovarianceKernel:
    """Tests for covariance_kernel."""

    def test_unit_variance(self, stealthy_1d: StructureFunction) -> None:
        assert covariance_kernel(stealthy_1d, 3).center == pytest.approx(1.0, abs=1e-12)

    def test_stealthy_closed_form(self, stealthy_1d: StructureFunction) -> None:
        kernel = covariance_kernel(stealthy_1d, 3)
        expected = [2.0 / (3.0 * math.pi), 0.0, -2.0 / math.pi, 1.0, -2.0 / math.pi, 0.0, 2.0 / (3.0 * math.pi)]
        np.testing.assert_allclose(kernel.table, expected, atol=1e-12)

    def test_white_noise_is_a_delta(self, white_noise_2d: StructureFunction) -> None:
        kernel = covariance_kernel(white_noise_2d, 2)
        expected = np.zeros((5, 5))
        expected[2, 2] = 1.0
        np.testing.assert_allclose(kernel.table, expected, atol=1e-12)

    def test_cosine_series(self, cosine_1d: StructureFunction) -> None:
        kernel = covariance_kernel(cosine_1d, 2)
        np.testing.assert_allclose(kernel.table, [0.0, 0.25, 1.0, 0.25, 0.0], atol=1e-14)

    def test_fractional_difference(self, radial_power_1d: StructureFunction) -> None:
        kernel = covariance_kernel(radial_power_1d, 1)
        # a(1)/a(0) = (-α/2)/(1 + α/2) at α = 1/2
        assert kernel.at(np.array([[1]]))[0] == pytest.approx(-0.2, abs=1e-10)

    def test_axes_stealthy_is_a_product(
        self, axes_stealthy_2d: StructureFunction, stealthy_1d: StructureFunction
    ) -> None:
        k2 = covariance_kernel(axes_stealthy_2d, 3).table
        k1 = covariance_kernel(stealthy_1d, 3).table
        np.testing.assert_allclose(k2, np.outer(k1, k1), atol=1e-9)

    def test_negative_radius(self, stealthy_1d: StructureFunction) -> None:
        with pytest.raises(DomainError):
            covariance_kernel(stealthy_1d, -1)

    @pytest.mark.parametrize(
        "spec",
        [
            StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, delta=1.0),
            StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, dimension=2, delta=1.0),
            StructureFunctionSpec(family=StructureFamily.AXES_STEALTHY, dimension=2, delta=1.0),
        ],
        ids=["stealthy-1d", "stealthy-ball-2d", "axes-stealthy-2d"],
    )
    def test_decays_between_shells(self, spec: StructureFunctionSpec) -> None:
        kernel = covariance_kernel(make_structure_function(spec), 64)
        assert _shell_max(kernel.table, 64, 64) <= 0.5 * _shell_max(kernel.table, 64, 8)


def _shell_max(table: np.ndarray, radius: int, shell: int) -> float:
    """Largest |K(j)| over ‖j‖_∞ = shell."""
    lags = np.indices(table.shape) - radius
    mask = np.max(np.abs(lags), axis=0) == shell
    return float(np.max(np.abs(table[mask])))


class TestScaledBesselI:
    """Tests for scaled_bessel_i."""

    def test_matches_scipy_for_moderate_arguments(self) -> None:
        orders = np.arange(6)
        z = np.array([1e-8, 0.3, 2.0, 50.0, 1e4])
        np.testing.assert_allclose(scaled_bessel_i(orders, z), special.ive(orders[:, None], z[None, :]), rtol=1e-12)

    def test_large_arguments_are_finite(self) -> None:
        z = np.array([1e8, 1e12, 1e15, 1e18])
        values = scaled_bessel_i(np.arange(4), z)
        assert np.all(np.isfinite(values))
        np.testing.assert_allclose(values, np.broadcast_to(1.0 / np.sqrt(2.0 * math.pi * z), values.shape), rtol=1e-6)

    def test_first_correction_term(self) -> None:
        z = 4e7
        value = float(scaled_bessel_i(np.array([3]), np.array([z]))[0, 0])
        expected = (1.0 - 35.0 / (8.0 * z)) / math.sqrt(2.0 * math.pi * z)
        assert value == pytest.approx(expected, rel=1e-12)


class TestRadialPowerKernels:
    """Radial-power kernels in d ≥ 2 (Bessel subordination)."""

    @pytest.mark.parametrize("dimension", [2, 3])
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
    def test_construction_and_kernel(self, dimension: int, alpha: float) -> None:
        S = make_structure_function(
            StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=dimension, alpha=alpha)
        )
        assert math.isfinite(S.normalization) and S.normalization > 0.0
        kernel = covariance_kernel(S, 3)
        assert kernel.method == "bessel-subordination"
        assert math.isfinite(kernel.error_estimate)
        assert kernel.center == pytest.approx(1.0, abs=1e-6)
        table = kernel.table
        off_diagonal = np.ones(table.shape, dtype=bool)
        off_diagonal[(3,) * dimension] = False
        assert np.all(table[off_diagonal] < 0.0)
        e1 = np.zeros(dimension, dtype=int)
        e2 = np.zeros(dimension, dtype=int)
        e1[0] = 1
        e2[1] = 1
        assert kernel.at(e1) == pytest.approx(kernel.at(e2), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_agrees_with_spectral_integral(self, alpha: float) -> None:
        S = make_structure_function(
            StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=2, alpha=alpha)
        )
        kernel = covariance_kernel(S, 2)
        for lag in ((1, 0), (1, 1), (2, 1)):
            result = integrate_spectrum(
                S, lambda theta, s, m=lag: s * np.cos(theta[:, 0] * m[0] + theta[:, 1] * m[1])
            )
            assert kernel.at(np.array(lag)) == pytest.approx(result.value / (2.0 * math.pi) ** 2, abs=1e-4)


# =============================================================================
# Limits
# =============================================================================

class TestLimits:
    """Tests for sigma_sq_d, sigma_sq_limit and gap_fraction."""

    def test_stealthy_sigma_d(self, stealthy_1d: StructureFunction) -> None:
        assert sigma_sq_d(stealthy_1d).to_float() == pytest.approx(8.0 / math.pi)

    def test_axes_stealthy_sigma_d(self, axes_stealthy_2d: StructureFunction) -> None:
        assert sigma_sq_d(axes_stealthy_2d).to_float() == pytest.approx(64.0 / math.pi**2)

    def test_stealthy_lattice_limit(self, stealthy_1d: StructureFunction) -> None:
        assert sigma_sq_limit(stealthy_1d).to_float() == pytest.approx(2.0 / math.pi)

    def test_axes_stealthy_lattice_limit(self, axes_stealthy_2d: StructureFunction) -> None:
        assert sigma_sq_limit(axes_stealthy_2d).to_float() == pytest.approx(4.0 / math.pi**2)

    def test_continuum_limit_scales_sigma_d(self, stealthy_1d: StructureFunction) -> None:
        limit = sigma_sq_limit(stealthy_1d, IndicatorMode.CONTINUUM).to_float()
        assert limit == pytest.approx(8.0 / math.pi / (2.0 * math.pi))

    def test_white_noise_is_infinite(self, white_noise_1d: StructureFunction) -> None:
        assert sigma_sq_d(white_noise_1d).kind.value == "+inf"
        assert not sigma_sq_limit(white_noise_1d).is_finite

    def test_gap_fractions(self, stealthy_1d: StructureFunction, axes_stealthy_2d: StructureFunction) -> None:
        assert gap_fraction(stealthy_1d) == pytest.approx(0.5)
        assert gap_fraction(axes_stealthy_2d) == pytest.approx(0.75)

    def test_separable_factors(self, axes_stealthy_2d: StructureFunction, cosine_1d: StructureFunction) -> None:
        factors = separable_factors(axes_stealthy_2d)
        assert factors is not None and len(factors) == 2
        assert factors[0].gap == pytest.approx(math.pi / 2)
        assert separable_factors(cosine_1d) is None


class TestIntegrateSpectrum:
    """Tests for integrate_spectrum."""

    def test_normalized_mass(self, stealthy_1d: StructureFunction, cosine_1d: StructureFunction) -> None:
        for S in (stealthy_1d, cosine_1d):
            result = integrate_spectrum(S, lambda theta, s: s)
            assert result.converged
            assert result.value == pytest.approx(2.0 * math.pi, abs=1e-8)

    def test_weighted_integrand(self, cosine_1d: StructureFunction) -> None:
        result = integrate_spectrum(cosine_1d, lambda theta, s: s * np.cos(theta[:, 0]))
        assert result.value == pytest.approx(0.5 * math.pi, abs=1e-8)

    def test_shell(self, white_noise_1d: StructureFunction) -> None:
        result = integrate_spectrum(white_noise_1d, lambda theta, s: s, r_min=1.0, r_max=2.0)
        assert result.value == pytest.approx(2.0, abs=1e-8)
