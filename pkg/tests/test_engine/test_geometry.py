"""
Tests for windows, local masses and indicator transforms.
"""

import math

import numpy as np
import pytest

from src.engine.geometry import (
    ball_transform_direct,
    bounding_box,
    dirichlet_run,
    indicator_ft,
    lattice_points,
    local_mass,
    point_count,
)
from src.models.domain import Domain, IndicatorMode
from src.models.errors import GeometryError
from src.models.field import FieldSample


def _field(values: np.ndarray) -> FieldSample:
    return FieldSample(
        dimension=values.ndim, side=values.shape[0], values=values, seed=0, structure_id="test"
    )


# =============================================================================
# Point sets
# =============================================================================

class TestPointSets:
    """Tests for lattice point enumeration."""

    @pytest.mark.parametrize("L, count", [(1.0, 5), (2.0, 13), (3.0, 29), (2.5, 21)])
    def test_disc_counts(self, L: float, count: int) -> None:
        assert point_count(Domain.ball(L, 2)) == count

    def test_cube_count(self) -> None:
        assert point_count(Domain.cube(2.0, 2)) == 25

    def test_half_open_box(self) -> None:
        lo, hi = bounding_box(Domain.box(2.0, (1,)))
        assert (lo[0], hi[0]) == (2, 3)

    def test_closed_box(self) -> None:
        lo, hi = bounding_box(Domain.box(2.0, (1,), closed=True))
        assert (lo[0], hi[0]) == (2, 4)

    def test_half_open_boxes_tile(self) -> None:
        first = set(map(tuple, lattice_points(Domain.box(2.5, (0, 0)))))
        second = set(map(tuple, lattice_points(Domain.box(2.5, (1, 0)))))
        assert not first & second
        assert first | second == {(x, y) for x in range(5) for y in range(3)}

    def test_points_are_lexicographic(self) -> None:
        points = lattice_points(Domain.ball(1.0, 2))
        assert [tuple(p) for p in points] == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]


# =============================================================================
# Local mass
# =============================================================================

class TestLocalMass:
    """Tests for local_mass."""

    def test_constant_field_counts_points(self) -> None:
        field = _field(np.ones((16, 16)))
        assert local_mass(field, Domain.ball(3.0, 2)) == 29.0

    def test_wraps_around_the_torus(self) -> None:
        values = np.zeros(16)
        values[15] = 2.0
        values[1] = 3.0
        assert local_mass(_field(values), Domain.cube(1.0, 1)) == 5.0

    def test_anchor_translates(self) -> None:
        values = np.arange(16, dtype=float)
        assert local_mass(_field(values), Domain.cube(1.0, 1), anchor=(5,)) == 4.0 + 5.0 + 6.0

    def test_window_must_fit(self) -> None:
        with pytest.raises(GeometryError):
            local_mass(_field(np.ones(8)), Domain.cube(4.0, 1))


# =============================================================================
# Indicator transforms
# =============================================================================

class TestIndicatorTransform:
    """Tests for indicator_ft and dirichlet_run."""

    def test_dirichlet_run_at_zero(self) -> None:
        assert dirichlet_run(-3, 3, np.array([0.0]))[0] == pytest.approx(7.0)

    def test_lattice_transform_at_zero_is_count(self) -> None:
        domain = Domain.ball(4.0, 2)
        assert indicator_ft(domain, (0.0, 0.0)) == pytest.approx(point_count(domain))

    def test_lattice_ball_matches_brute_force(self) -> None:
        domain = Domain.ball(3.5, 2)
        points = lattice_points(domain)
        xi = np.array([0.7, -1.3])
        expected = np.sum(np.exp(-1j * points @ xi))
        assert indicator_ft(domain, xi) == pytest.approx(expected, abs=1e-10)

    def test_lattice_box_matches_brute_force(self) -> None:
        domain = Domain.box(3.0, (1, 2))
        points = lattice_points(domain)
        xi = np.array([[0.4, 2.0], [-1.0, 0.3]])
        expected = np.exp(-1j * xi @ points.T).sum(axis=1)
        np.testing.assert_allclose(indicator_ft(domain, xi), expected, atol=1e-10)

    def test_continuum_cube_at_zero_is_volume(self) -> None:
        domain = Domain.cube(2.0, 3)
        value = indicator_ft(domain, (0.0, 0.0, 0.0), IndicatorMode.CONTINUUM)
        assert value == pytest.approx(64.0)

    def test_continuum_ball_matches_polar_quadrature(self) -> None:
        domain = Domain.ball(2.0, 2)
        xi = np.array([0.9, 0.4])
        closed = indicator_ft(domain, xi, IndicatorMode.CONTINUUM)
        assert closed.real == pytest.approx(ball_transform_direct(2, 2.0, xi), rel=1e-8)
        assert abs(closed.imag) < 1e-14

    def test_continuum_interval(self) -> None:
        value = indicator_ft(Domain.cube(1.5, 1), 1.0, IndicatorMode.CONTINUUM)
        assert value == pytest.approx(2.0 * math.sin(1.5))
