"""Тесты синус-базиса, оператора L_ω и функции Грина."""

import math

import numpy as np
import pytest

from trap_kohn.services.frequency import ComplexFrequency
from trap_kohn.services.model import ModelParams, derive_constants
from trap_kohn.services.spectral import (
    GridField,
    apply_L,
    basis_fn,
    convergence_ratio,
    eigen_residual,
    eigenvalue_sq,
    gauss_legendre,
    greens_function,
    integrate,
    mode_index,
    uniform_nodes,
)
from trap_kohn.utils.exceptions import DomainError, GridTooCoarseError, PoleOnRealAxisError


def _greens_closed(omega: float, x: float, y: float, eps: float) -> float:
    """Та же функция Грина через Σ sin(nx)sin(ny)/(n² − a²) в замкнутом виде (ω_ℓ = 1, 0 < x, y < π)"""
    a = omega / eps
    lo, hi = min(x, y), max(x, y)
    series = math.pi * math.sin(a * (math.pi - hi)) * math.sin(a * lo) / (2.0 * a * math.sin(math.pi * a))
    sx, sy = math.sin(x), math.sin(y)
    bracket = sx * sy / (1.0 - omega**2) - sx * sy / (eps**2 - omega**2) + series / eps**2
    return -(2.0 / math.pi) * bracket


class TestBasis:
    """Тесты базиса и квадратуры."""

    def test_weights_sum(self):
        """Сумма весов Гаусса–Лежандра равна длине отрезка."""
        nodes, weights = gauss_legendre(64)
        assert weights.sum() == pytest.approx(math.pi, rel=1e-14)
        assert np.all((nodes > -math.pi) & (nodes < 0.0))

    @pytest.mark.parametrize("m, n", [(1, 1), (2, 2), (5, 5), (1, 2), (2, 7), (3, 6)])
    def test_orthonormal(self, m, n):
        """∫φ_mφ_n du = δ_mn."""
        value = integrate(lambda u: basis_fn(m, u) * basis_fn(n, u))
        assert value == pytest.approx(1.0 if m == n else 0.0, abs=1e-12)

    def test_dirichlet(self):
        """Базисные функции обращаются в ноль на концах."""
        assert basis_fn(3, -math.pi) == pytest.approx(0.0, abs=1e-15)
        assert basis_fn(3, 0.0) == 0.0

    def test_mode_index(self):
        """Номер моды: целое ≥ 1."""
        assert mode_index(3) == 3
        with pytest.raises(DomainError):
            mode_index(0)
        with pytest.raises(DomainError):
            basis_fn(1.5, -1.0)

    def test_uniform_nodes(self):
        """Сетка содержит оба конца."""
        nodes = uniform_nodes(7)
        assert nodes.size == 9
        assert nodes[0] == -math.pi and nodes[-1] == 0.0


class TestEigenvalues:
    """Тесты точного спектра."""

    def test_kohn_mode(self, dc_06):
        """λ_1² = 1 − ω²/ω_ℓ² не зависит от взаимодействия."""
        assert eigenvalue_sq(1, 0.5, dc_06) == pytest.approx(0.75)

    def test_higher_mode(self, dc_06):
        """λ_2² = 4ε̃² − ω²."""
        assert eigenvalue_sq(2, 0.5, dc_06) == pytest.approx(4 * 0.64 - 0.25)

    def test_complex_frequency(self, dc_06):
        """При η > 0 собственное значение комплексное."""
        value = eigenvalue_sq(1, ComplexFrequency(omega=0.5, eta=0.1), dc_06)
        assert value == pytest.approx(complex(0.76, -0.1))


class TestApplyL:
    """Тесты конечно-разностного оператора."""

    @pytest.mark.parametrize("v", [0.0, 0.3, 0.6])
    @pytest.mark.parametrize("omega", [0.3, 0.5, 1.3])
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_eigen_residual_small(self, v, omega, n):
        """Невязка L_ωφ_n + λ_n²φ_n на 1024 узлах меньше 1e-4."""
        params = ModelParams(vtilde_c=v)
        dc = derive_constants(params)
        assert eigen_residual(n, omega, dc, params, 1024) < 1e-4

    @pytest.mark.parametrize("v", [0.0, 0.6])
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_second_order(self, v, n):
        """Уменьшение шага вдвое уменьшает невязку в 4 раза."""
        params = ModelParams(vtilde_c=v)
        dc = derive_constants(params)
        assert convergence_ratio(n, 0.5, dc, params, 255) == pytest.approx(4.0, abs=0.3)

    def test_kohn_mode_is_eigenfunction(self, params_06, dc_06):
        """φ_1 переходит в −λ_1²φ_1 и при взаимодействии."""
        field = GridField.from_function(lambda u: basis_fn(1, u), 511)
        image = apply_L(0.5, field, dc_06, params_06)
        np.testing.assert_allclose(image.values, -0.75 * field.values, atol=1e-5)

    def test_complex_field(self, params_06, dc_06):
        """Комплексное поле обрабатывается покомпонентно."""
        field = GridField.from_function(lambda u: (1 + 2j) * np.sin(u), 255)
        image = apply_L(0.5, field, dc_06, params_06)
        np.testing.assert_allclose(image.values, -0.75 * field.values, atol=1e-4)

    def test_grid_too_coarse(self, params_06, dc_06):
        """Меньше 8 внутренних узлов отклоняется."""
        field = GridField.from_function(np.sin, 4)
        with pytest.raises(GridTooCoarseError):
            apply_L(0.5, field, dc_06, params_06)

    def test_dirichlet_violation(self):
        """Поле с ненулевым краем отклоняется."""
        nodes = uniform_nodes(9)
        with pytest.raises(DomainError):
            GridField(nodes=nodes, values=np.ones_like(nodes))


class TestGreensFunction:
    """Тесты функции Грина."""

    def test_matches_closed_series(self, dc_06):
        """Сумма по модам совпадает с замкнутой формой ряда."""
        freq = ComplexFrequency(omega=0.5, eta=0.0)
        value = greens_function(freq, -math.pi / 2, -math.pi / 3, dc_06, n_max=20_000)
        expected = _greens_closed(0.5, math.pi / 2, math.pi / 3, 0.8)
        assert value.imag == 0.0
        assert value.real == pytest.approx(expected, rel=1e-6)
        assert value.real == pytest.approx(-0.69112, rel=1e-4)

    def test_symmetric(self, dc_06):
        """G(u, u′) = G(u′, u)."""
        freq = ComplexFrequency(omega=0.7, eta=1e-3)
        a = greens_function(freq, -0.4, -2.1, dc_06, n_max=2000)
        b = greens_function(freq, -2.1, -0.4, dc_06, n_max=2000)
        assert a == pytest.approx(b, rel=1e-13)

    def test_vanishes_on_boundary(self, dc_06):
        """G = 0 при u = 0."""
        freq = ComplexFrequency(omega=0.5, eta=0.0)
        assert abs(greens_function(freq, 0.0, -1.0, dc_06, n_max=500)) < 1e-12

    def test_pole_on_real_axis(self, dc_06):
        """ω = 2ε̃ при η = 0: ошибка."""
        freq = ComplexFrequency(omega=2 * dc_06.eps_tilde, eta=0.0)
        with pytest.raises(PoleOnRealAxisError, match="pole on real axis"):
            greens_function(freq, -1.0, -2.0, dc_06, n_max=100)

    def test_kohn_pole(self, dc_06):
        """ω = ω_ℓ при η = 0: ошибка."""
        with pytest.raises(PoleOnRealAxisError):
            greens_function(ComplexFrequency(omega=1.0, eta=0.0), -1.0, -2.0, dc_06, n_max=100)

    def test_truncation_tail(self, dc_06):
        """|G(N) − G(2N)| убывает как 1/N: хвост Σ 1/(n²ε̃²) ограничивает N·|ΔG| сверху и снизу."""
        freq = ComplexFrequency(omega=0.5, eta=0.0)
        scaled = []
        for n_max in (50, 100, 200, 400):
            short = greens_function(freq, -1.0, -1.0, dc_06, n_max=n_max)
            long = greens_function(freq, -1.0, -1.0, dc_06, n_max=2 * n_max)
            scaled.append(n_max * abs(short - long))
        # (2/π)·(1/ε̃²)·½·(1/N − 1/2N)·N ≈ 0.249 при ε̃ = 0.8
        assert all(0.15 < s < 0.51 for s in scaled)
        assert scaled[-1] == pytest.approx(0.249, rel=0.05)

    def test_regularized_pole(self, dc_06):
        """При η > 0 полюс регуляризован."""
        freq = ComplexFrequency(omega=1.0, eta=1e-3)
        assert np.isfinite(greens_function(freq, -1.0, -2.0, dc_06, n_max=100))
