"""Тесты отображения z ↔ u и огибающей."""

import math

import numpy as np
import pytest

from trap_kohn.services.geometry import (
    TrapCoordinate,
    envelope,
    kohn_density_profile,
    u_of_z,
    z_of_u,
)
from trap_kohn.utils.exceptions import DomainError, OutsideFermiSeaError


class TestCoordinateMap:
    """Тесты u₀(z) и z(u)."""

    @pytest.mark.parametrize(
        "z, expected",
        [(0.0, -math.pi / 2), (1.0, 0.0), (-1.0, -math.pi), (0.5, -math.pi / 3)],
    )
    def test_reference_points(self, z, expected):
        """Опорные точки отображения."""
        assert u_of_z(z, 1.0) == pytest.approx(expected, abs=1e-15)

    def test_scaled_fermi_length(self):
        """Координата измеряется в единицах L_F."""
        assert u_of_z(1.0, 2.0) == pytest.approx(-math.pi / 3)

    def test_inverse(self):
        """z(u₀(z)) = z на всём отрезке."""
        z = np.linspace(-1.0, 1.0, 41)
        np.testing.assert_allclose(z_of_u(u_of_z(z, 1.0), 1.0), z, atol=1e-14)

    def test_scalar_returns_float(self):
        """Скаляр на входе даёт float."""
        assert isinstance(u_of_z(0.3, 1.0), float)
        assert isinstance(envelope(0.3, 1.0), float)

    def test_outside_fermi_sea(self):
        """|z| > L_F отклоняется."""
        with pytest.raises(OutsideFermiSeaError, match="outside classical Fermi sea"):
            u_of_z(1.5, 1.0)

    def test_outside_in_array(self):
        """Одна плохая точка массива отклоняет весь массив."""
        with pytest.raises(OutsideFermiSeaError):
            envelope(np.array([0.0, 0.5, -1.01]), 1.0)

    def test_u_outside_interval(self):
        """u вне [−π, 0] отклоняется."""
        with pytest.raises(DomainError):
            z_of_u(0.1, 1.0)


class TestEnvelope:
    """Тесты огибающей Z(z)."""

    def test_value(self):
        """Z(0.6) = 0.8."""
        assert envelope(0.6, 1.0) == pytest.approx(0.8)

    def test_equals_minus_sin(self):
        """Z = −sin u₀(z)."""
        z = np.linspace(-0.99, 0.99, 25)
        np.testing.assert_allclose(envelope(z, 1.0), -np.sin(u_of_z(z, 1.0)), atol=1e-14)

    def test_edges_vanish(self):
        """На краях облака Z = 0."""
        assert envelope(1.0, 1.0) == 0.0
        assert envelope(-1.0, 1.0) == 0.0


class TestKohnDensityProfile:
    """Тесты профиля плотности моды Кона."""

    def test_value(self):
        """z/√(1 − z²) при z = 0.6."""
        assert kohn_density_profile(0.6, 1.0) == pytest.approx(0.75)

    def test_odd(self):
        """Профиль нечётен по z."""
        z = np.linspace(-0.9, 0.9, 19)
        np.testing.assert_allclose(kohn_density_profile(z, 1.0), -kohn_density_profile(-z, 1.0))

    def test_edge(self):
        """На краю профиль не определён."""
        with pytest.raises(DomainError):
            kohn_density_profile(1.0, 1.0)


class TestTrapCoordinate:
    """Тесты TrapCoordinate."""

    def test_round_trip(self):
        """from_z и from_u согласованы."""
        c = TrapCoordinate.from_z(0.5, 1.0)
        assert c.u == pytest.approx(-math.pi / 3)
        assert TrapCoordinate.from_u(c.u, 1.0).z == pytest.approx(0.5)
