"""
Tests for local-mass variances, box covariances and scans.

Tests cover:
- Spectral and direct variances against each other and exact values
- Box covariance limits and their sign pattern
- The Θ functional
- Exponent and Θ scans, including grid validation
- Bulk/boundary decompositions and the Monte Carlo variance
"""

import math

import numpy as np
import pytest

from src.engine.fluctuations import (
    ball_grid_decomposition,
    covariance_boxes,
    covariance_grid,
    covariance_limit,
    exponent_scan,
    fit_exponent,
    pair_sum,
    neighbourhood_covariance_sum,
    predicted_exponents,
    theta_ball,
    theta_scan,
    variance_direct,
    variance_monte_carlo,
    variance_spectral,
)
from src.engine.geometry import indicator_mask, point_count
from src.engine.spectral_models import covariance_kernel, make_structure_function, sigma_sq_limit
from src.models.domain import Domain, DomainShape, IndicatorMode
from src.models.errors import DomainError, UsageError
from src.models.spectrum import (
    Envelope,
    EnvelopeDirection,
    StructureFamily,
    StructureFunction,
    StructureFunctionSpec,
)
from src.models.values import ExtendedReal

SCALES = [10.0, 20.0, 40.0, 80.0, 160.0]
PLANAR_SCALES = [16.0, 32.0, 64.0, 128.0, 256.0]
PLANAR_FAMILIES = [
    StructureFunctionSpec(family=StructureFamily.CONSTANT, dimension=2),
    StructureFunctionSpec(family=StructureFamily.AXES_STEALTHY, dimension=2, delta=math.pi / 2),
    StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=2, alpha=0.5),
    StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, dimension=2, delta=math.pi / 2),
    StructureFunctionSpec(family=StructureFamily.ANISOTROPIC_PRODUCT, dimension=2, alphas=(0.5, 1.0)),
]


# =============================================================================
# Variances
# =============================================================================

class TestVariance:
    """Tests for variance_direct and variance_spectral."""

    def test_white_noise_variance_is_point_count(self, white_noise_2d: StructureFunction) -> None:
        domain = Domain.ball(3.0, 2)
        assert variance_direct(white_noise_2d, domain).value == pytest.approx(29.0)
        assert variance_spectral(white_noise_2d, domain).value == pytest.approx(29.0, rel=1e-9)

    def test_white_noise_cube(self, white_noise_1d: StructureFunction) -> None:
        assert variance_spectral(white_noise_1d, Domain.cube(5.0, 1)).value == pytest.approx(11.0, rel=1e-9)

    def test_direct_matches_spectral_under_a_gap(self, stealthy_1d: StructureFunction) -> None:
        domain = Domain.cube(20.0, 1)
        direct = variance_direct(stealthy_1d, domain)
        spectral = variance_spectral(stealthy_1d, domain)
        assert spectral.converged
        assert direct.value == pytest.approx(spectral.value, rel=1e-6)

    def test_histogram_route_matches_pair_route(self, stealthy_1d: StructureFunction) -> None:
        domain = Domain.cube(20.0, 1)
        mask, lo = indicator_mask(domain)
        kernel = covariance_kernel(stealthy_1d, 40)
        by_lags = pair_sum(kernel, mask, lo, mask, lo)
        assert by_lags == pytest.approx(variance_direct(stealthy_1d, domain, kernel).value, rel=1e-12)

    def test_large_window_goes_through_histogram(self, stealthy_1d: StructureFunction) -> None:
        assert variance_direct(stealthy_1d, Domain.cube(600.0, 1)).value == pytest.approx(2.0 / math.pi, rel=0.02)

    def test_stealthy_interval_variance_converges(self, stealthy_1d: StructureFunction) -> None:
        value = variance_direct(stealthy_1d, Domain.cube(200.0, 1)).value
        assert value == pytest.approx(sigma_sq_limit(stealthy_1d).to_float(), rel=0.02)

    def test_short_kernel_rejected(self, stealthy_1d: StructureFunction) -> None:
        kernel = covariance_kernel(stealthy_1d, 2)
        with pytest.raises(UsageError):
            variance_direct(stealthy_1d, Domain.cube(5.0, 1), kernel)


# =============================================================================
# Box covariances
# =============================================================================

class TestCovarianceLimit:
    """Tests for covariance_limit."""

    @pytest.mark.parametrize(
        "offset, expected",
        [((0,), 1.0), ((1,), -0.5), ((2,), 0.0), ((0, 0), 1.0), ((1, 0), -0.5), ((1, 1), 0.25), ((3, 1), 0.0)],
    )
    def test_values(self, offset: tuple[int, ...], expected: float) -> None:
        assert covariance_limit(1.0, offset) == expected

    def test_accepts_extended_real(self) -> None:
        assert covariance_limit(ExtendedReal.finite(2.0), (1, 1)) == 0.5

    def test_rejects_negative_offset(self) -> None:
        with pytest.raises(DomainError):
            covariance_limit(1.0, (-1,))

    def test_rejects_infinite_sigma(self) -> None:
        with pytest.raises(DomainError):
            covariance_limit(ExtendedReal.pos_inf(), (0,))


class TestCovarianceBoxes:
    """Tests for covariance_boxes and covariance_grid."""

    def test_direct_matches_spectral(self, stealthy_1d: StructureFunction) -> None:
        spectral = covariance_boxes(stealthy_1d, 10.0, (1,))
        direct = covariance_boxes(stealthy_1d, 10.0, (1,), method="direct")
        assert direct.value == pytest.approx(spectral.value, rel=1e-6, abs=1e-9)

    def test_adjacent_boxes_approach_half_limit(self, stealthy_1d: StructureFunction) -> None:
        value = covariance_boxes(stealthy_1d, 400.0, (1,), method="direct").value
        assert value == pytest.approx(-1.0 / math.pi, rel=0.02)

    def test_zero_offset_is_box_variance(self, white_noise_1d: StructureFunction) -> None:
        assert covariance_boxes(white_noise_1d, 4.0, (0,)).value == pytest.approx(4.0, rel=1e-9)

    def test_direct_route_needs_lattice_mode(self, stealthy_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            covariance_boxes(stealthy_1d, 4.0, (1,), IndicatorMode.CONTINUUM, method="direct")

    def test_unknown_method(self, stealthy_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            covariance_boxes(stealthy_1d, 4.0, (1,), method="fourier")

    def test_offset_length_must_match(self, stealthy_1d: StructureFunction) -> None:
        with pytest.raises(DomainError):
            covariance_boxes(stealthy_1d, 4.0, (1, 0))

    def test_axes_stealthy_sign_pattern(self, axes_stealthy_2d: StructureFunction) -> None:
        offsets = [(0, 0), (1, 0), (0, 1), (1, 1)]
        rows = covariance_grid(axes_stealthy_2d, 32.0, offsets, workers=1)
        for row in rows:
            assert row.predicted_limit is not None
            assert np.sign(row.value) == np.sign(row.predicted_limit)
            assert row.ratio == pytest.approx(1.0, abs=0.1)

    def test_disjoint_boxes_are_small(self, axes_stealthy_2d: StructureFunction) -> None:
        sigma = sigma_sq_limit(axes_stealthy_2d).to_float()
        rows = covariance_grid(axes_stealthy_2d, 128.0, [(2, 0), (2, 2)], workers=1)
        for row in rows:
            assert row.predicted_limit == 0.0
            assert row.ratio is None
            assert abs(row.value) <= 0.02 * sigma

    def test_white_noise_disjoint_boxes_are_independent(self, white_noise_2d: StructureFunction) -> None:
        for method in ("spectral", "direct"):
            value = covariance_boxes(white_noise_2d, 8.0, (2, 0), method=method).value
            assert value == pytest.approx(0.0, abs=1e-8)

    def test_infinite_limit_leaves_prediction_empty(self, white_noise_1d: StructureFunction) -> None:
        rows = covariance_grid(white_noise_1d, 4.0, [(0,), (1,)], workers=1)
        assert [row.predicted_limit for row in rows] == [None, None]
        assert rows[1].value == pytest.approx(0.0, abs=1e-9)


# =============================================================================
# Θ functional
# =============================================================================

class TestThetaBall:
    """Tests for theta_ball."""

    def test_white_noise_closed_form(self, white_noise_1d: StructureFunction) -> None:
        L = 10.0
        # L² · 2π/L + 2 (L/π - 1/π)
        expected = 2.0 * math.pi * L + 2.0 * (L - 1.0) / math.pi
        assert theta_ball(white_noise_1d, L).value == pytest.approx(expected, rel=1e-8)

    def test_rejects_nonpositive_constant(self, white_noise_1d: StructureFunction) -> None:
        with pytest.raises(DomainError):
            theta_ball(white_noise_1d, 10.0, c=0.0)


# =============================================================================
# Scans
# =============================================================================

class TestScans:
    """Tests for exponent_scan and theta_scan."""

    def test_too_few_points(self, white_noise_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            exponent_scan(white_noise_1d, DomainShape.CUBE, [10.0, 20.0, 100.0])

    def test_less_than_a_decade(self, white_noise_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            exponent_scan(white_noise_1d, DomainShape.CUBE, [10.0, 12.0, 14.0, 16.0, 18.0])

    def test_scales_must_exceed_one(self, white_noise_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            exponent_scan(white_noise_1d, DomainShape.CUBE, [0.5, 1.0, 2.0, 4.0, 8.0])

    def test_white_noise_grows_like_volume(self, white_noise_1d: StructureFunction) -> None:
        report = exponent_scan(white_noise_1d, DomainShape.CUBE, SCALES, workers=1)
        assert report.fit is not None
        assert report.fit.predicted_beta == 1.0
        assert report.fit.beta == pytest.approx(1.0, abs=0.03)
        np.testing.assert_allclose(report.stat_values("variance"), [2 * L + 1 for L in SCALES])

    def test_stealthy_interval_is_bounded(self, stealthy_1d: StructureFunction) -> None:
        report = exponent_scan(stealthy_1d, DomainShape.CUBE, SCALES, workers=1)
        assert report.fit is not None
        assert report.fit.predicted_beta == 0.0
        assert abs(report.fit.beta) < 0.1
        assert report.metadata["statistic"] == "variance"

    def test_theta_ratio_is_flat(self, white_noise_1d: StructureFunction) -> None:
        report = theta_scan(white_noise_1d, SCALES, workers=1)
        assert report.hypothesis_met
        assert report.metadata["envelope"] == "family"
        assert report.fit is not None
        assert abs(report.fit.beta) < 0.05
        ratios = report.stat_values("ratio")
        assert np.all((ratios > 0.2) & (ratios < 0.4))

    def test_theta_without_envelope_is_flagged(self, cosine_1d: StructureFunction) -> None:
        report = theta_scan(cosine_1d, SCALES, workers=1)
        assert not report.hypothesis_met
        assert report.metadata["envelope"] is None

    def test_theta_with_declared_envelope(self, cosine_1d: StructureFunction) -> None:
        spec = cosine_1d.spec.model_copy(update={"envelope": Envelope(direction=EnvelopeDirection.INCREASING)})
        report = theta_scan(make_structure_function(spec), SCALES, workers=1)
        assert report.hypothesis_met
        assert report.metadata["envelope"] == "declared"

    def test_fit_divides_out_log_power(self) -> None:
        scales = np.array(SCALES)
        fit = fit_exponent(scales, scales**0.5 * np.log(scales), gamma=1.0)
        assert fit.beta == pytest.approx(0.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_predicted_exponents(
        self, white_noise_2d: StructureFunction, radial_power_1d: StructureFunction
    ) -> None:
        assert predicted_exponents(white_noise_2d, DomainShape.BALL) == (2.0, 0.0)
        assert predicted_exponents(radial_power_1d, DomainShape.CUBE) == (0.5, 0.0)


# =============================================================================
# Decompositions and Monte Carlo
# =============================================================================

class TestDecompositions:
    """Tests for the bulk/boundary splits."""

    def test_neighbourhood_sum_of_white_noise(self, white_noise_2d: StructureFunction) -> None:
        assert neighbourhood_covariance_sum(white_noise_2d, 4.0).value == pytest.approx(16.0)

    def test_ball_grid_sums_to_variance(self, stealthy_1d: StructureFunction) -> None:
        split = ball_grid_decomposition(stealthy_1d, 50.0)
        total = variance_direct(stealthy_1d, Domain.ball(50.0, 1)).value
        assert split.block == 8
        assert split.total_variance == pytest.approx(total, rel=1e-9, abs=1e-12)
        assert split.interior_variance + split.boundary_variance == pytest.approx(split.total_variance)

    def test_white_noise_ball_grid(self, white_noise_2d: StructureFunction) -> None:
        split = ball_grid_decomposition(white_noise_2d, 10.0)
        assert split.total_variance == pytest.approx(point_count(Domain.ball(10.0, 2)))
        assert split.n_interior > 0 and split.n_boundary > 0


class TestMonteCarlo:

    def test_white_noise_cube(self, white_noise_1d: StructureFunction) -> None:
        estimate = variance_monte_carlo(white_noise_1d, Domain.cube(3.0, 1), 64, 400, seed=21, workers=1)
        assert estimate.method == "monte-carlo"
        assert abs(estimate.value - 7.0) < 4.0 * estimate.error

    def test_needs_two_replicates(self, white_noise_1d: StructureFunction) -> None:
        with pytest.raises(UsageError):
            variance_monte_carlo(white_noise_1d, Domain.cube(3.0, 1), 64, 1, seed=0)


# =============================================================================
# Acceptance
# =============================================================================

@pytest.mark.slow
class TestAcceptance:
    """Long scans over the reference models."""

    def test_axes_stealthy_two_dimensional_limit(self, axes_stealthy_2d: StructureFunction) -> None:
        value = variance_spectral(axes_stealthy_2d, Domain.cube(256.0, 2)).value
        assert value == pytest.approx(4.0 / math.pi**2, rel=0.02)

    def test_white_noise_disc_scan(self, white_noise_2d: StructureFunction) -> None:
        report = exponent_scan(white_noise_2d, DomainShape.BALL, [4.0, 8.0, 16.0, 32.0, 64.0], workers=1)
        assert report.fit is not None
        assert report.fit.beta == pytest.approx(2.0, abs=0.05)

    @pytest.mark.parametrize("L", [5.0, 10.0, 20.0])
    @pytest.mark.parametrize("spec", PLANAR_FAMILIES, ids=lambda spec: spec.family.value)
    def test_direct_matches_spectral_in_the_plane(self, spec: StructureFunctionSpec, L: float) -> None:
        S = make_structure_function(spec)
        domain = Domain.cube(L, 2)
        direct = variance_direct(S, domain).value
        assert variance_spectral(S, domain).value == pytest.approx(direct, rel=1e-6)

    @pytest.mark.parametrize("alpha, beta", [(0.5, 1.5), (1.0, 1.0)])
    def test_radial_power_cube_exponents(self, alpha: float, beta: float) -> None:
        S = make_structure_function(
            StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=2, alpha=alpha)
        )
        report = exponent_scan(S, DomainShape.CUBE, PLANAR_SCALES, workers=1)
        assert report.fit is not None
        assert report.fit.predicted_gamma == (1.0 if alpha == 1.0 else 0.0)
        assert report.fit.beta == pytest.approx(beta, abs=0.1)

    def test_axes_stealthy_cube_against_ball(self, axes_stealthy_2d: StructureFunction) -> None:
        cube = exponent_scan(axes_stealthy_2d, DomainShape.CUBE, PLANAR_SCALES, workers=1)
        ball = exponent_scan(axes_stealthy_2d, DomainShape.BALL, PLANAR_SCALES, workers=1)
        assert cube.fit is not None and ball.fit is not None
        assert cube.fit.beta == pytest.approx(0.0, abs=0.1)
        assert ball.fit.beta == pytest.approx(1.0, abs=0.15)

    @pytest.mark.parametrize(
        "spec",
        [
            StructureFunctionSpec(family=StructureFamily.CONSTANT, dimension=2),
            StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=2, alpha=0.5),
            StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, dimension=2, alpha=1.0),
            StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, dimension=2, delta=math.pi / 2),
        ],
        ids=["white-noise", "radial-power-0.5", "radial-power-1", "stealthy-gap"],
    )
    def test_theta_sandwich_in_the_plane(self, spec: StructureFunctionSpec) -> None:
        report = theta_scan(make_structure_function(spec), [16.0, 32.0, 64.0, 128.0, 256.0, 512.0], workers=1)
        assert report.hypothesis_met
        assert report.fit is not None
        assert abs(report.fit.beta) < 0.05
