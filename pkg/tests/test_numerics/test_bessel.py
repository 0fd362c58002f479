"""
Tests for the Bessel routines.

Tests cover:
- Agreement with scipy.special across the series/asymptotic split
- Closed forms of half-integer orders
- The leading-term remainder bound
- The ball Fourier transform
"""

import math

import numpy as np
import pytest
from scipy import special

from src.models.errors import DomainError
from src.numerics.bessel import (
    SERIES_ASYMPTOTIC_SPLIT,
    asymptotic_remainder_bound,
    ball_transform,
    bessel_j,
    leading_asymptotic,
)


# =============================================================================
# bessel_j
# =============================================================================

class TestBesselJ:
    """Tests for bessel_j."""

    @pytest.mark.parametrize("order", [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    def test_matches_scipy(self, order: float) -> None:
        z = np.array([0.0, 0.3, 1.0, 5.0, 11.9, 12.0, 12.1, 30.0, 250.0])
        np.testing.assert_allclose(bessel_j(order, z), special.jv(order, z), atol=1e-10)

    def test_scalar_in_scalar_out(self) -> None:
        value = bessel_j(0, 0.0)
        assert isinstance(value, float)
        assert value == pytest.approx(1.0)

    def test_half_order_closed_form(self) -> None:
        z = np.linspace(0.5, 40.0, 50)
        expected = np.sqrt(2.0 / (math.pi * z)) * np.sin(z)
        np.testing.assert_allclose(bessel_j(0.5, z), expected, atol=1e-12)

    def test_continuous_across_split(self) -> None:
        below = bessel_j(1, SERIES_ASYMPTOTIC_SPLIT - 1e-9)
        above = bessel_j(1, SERIES_ASYMPTOTIC_SPLIT + 1e-9)
        assert abs(below - above) < 1e-9

    @pytest.mark.parametrize("order", [-1.0, 0.25, 1.7])
    def test_rejects_invalid_order(self, order: float) -> None:
        with pytest.raises(DomainError):
            bessel_j(order, 1.0)

    def test_rejects_negative_argument(self) -> None:
        with pytest.raises(DomainError):
            bessel_j(0, -1.0)


# =============================================================================
# Asymptotics
# =============================================================================

class TestAsymptotics:
    """Tests for the leading Hankel term and its remainder bound."""

    @pytest.mark.parametrize("order", [0.0, 1.0, 1.5])
    def test_remainder_bound_holds(self, order: float) -> None:
        z_min = 20.0
        bound = asymptotic_remainder_bound(order, z_min)
        z = np.linspace(z_min, 400.0, 2000)
        remainder = np.abs(special.jv(order, z) - leading_asymptotic(order, z))
        assert np.all(remainder <= bound * z**-1.5 * (1 + 1e-9) + 1e-14)

    def test_half_order_leading_term_is_exact(self) -> None:
        z = np.linspace(1.0, 50.0, 20)
        np.testing.assert_allclose(leading_asymptotic(0.5, z), bessel_j(0.5, z), atol=1e-12)

    def test_bound_needs_positive_start(self) -> None:
        with pytest.raises(DomainError):
            asymptotic_remainder_bound(1.0, 0.0)


# =============================================================================
# Ball transform
# =============================================================================

class TestBallTransform:
    """Tests for ball_transform."""

    def test_one_dimensional_interval(self) -> None:
        k = np.array([0.1, 1.0, 3.0])
        np.testing.assert_allclose(ball_transform(1, 2.0, k), 2.0 * np.sin(2.0 * k) / k, rtol=1e-12)

    @pytest.mark.parametrize("dimension", [1, 2, 3])
    def test_zero_frequency_is_volume(self, dimension: int) -> None:
        volume = math.pi ** (dimension / 2) * 1.5**dimension / math.gamma(dimension / 2 + 1)
        assert ball_transform(dimension, 1.5, 0.0) == pytest.approx(volume)

    def test_small_frequency_approaches_volume(self) -> None:
        assert ball_transform(3, 1.0, 1e-6) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-9)

    def test_rejects_nonpositive_radius(self) -> None:
        with pytest.raises(DomainError):
            ball_transform(2, 0.0, 1.0)
