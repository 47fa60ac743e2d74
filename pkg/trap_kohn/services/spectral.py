"""Синус-базис на I_π, нелокальный оператор L_ω, точный спектр и функция Грина.

Собственные функции φ_n(u) = √(2/π)·sin(nu), n ≥ 1; проектор в L_ω действует
только на φ_1, поэтому λ_1² = 1 − ω²/ω_ℓ², а λ_n² = n²ε̃²/ω_ℓ² − ω²/ω_ℓ² при n ≥ 2.
Интегралы по I_π везде считаются одной квадратурой Гаусса–Лежандра.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
import structlog
from scipy.interpolate import CubicSpline

from trap_kohn.services.frequency import ComplexFrequency
from trap_kohn.services.model import DerivedConstants, ModelParams
from trap_kohn.utils.exceptions import DomainError, GridTooCoarseError, PoleOnRealAxisError
from trap_kohn.utils.types import ArrayR, ModeIndex

log = structlog.get_logger(__name__)

__all__ = [
    "mode_index",
    "GridField",
    "DEFAULT_QUAD_ORDER",
    "DEFAULT_N_MAX",
    "MIN_INTERIOR_NODES",
    "gauss_legendre",
    "integrate",
    "uniform_nodes",
    "basis_fn",
    "eigenvalue_sq",
    "apply_L",
    "greens_function",
    "eigen_residual",
    "convergence_ratio",
]

DEFAULT_QUAD_ORDER = 64
DEFAULT_N_MAX = 10_000
MIN_INTERIOR_NODES = 8
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
# |λ²| ниже порога при η = 0 считаем полюсом
POLE_TOLERANCE = 1e-13

Freq = Union[float, complex, ComplexFrequency]


def mode_index(n: int) -> ModeIndex:
    """Проверяет номер моды n ≥ 1"""
    if int(n) != n or n < 1:
        raise DomainError(f"mode index must be a positive integer, got {n!r}", field="n", value=n)
    return ModeIndex(int(n))


def _check_angle(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -math.pi) or np.any(arr > 0.0):
        raise DomainError("u outside [-pi, 0]", field="u")
    return arr


def _complex_omega(omega: Freq) -> complex:
    if isinstance(omega, ComplexFrequency):
        return omega.value
    return complex(omega)


@lru_cache(maxsize=32)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    # (−1, 1) → (−π, 0)
    nodes = 0.5 * math.pi * (x - 1.0)
    weights = 0.5 * math.pi * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order: int = DEFAULT_QUAD_ORDER) -> tuple[ArrayR, ArrayR]:
    """Узлы и веса Гаусса–Лежандра на (−π, 0)"""
    if order < 2:
        raise DomainError("quadrature order must be >= 2", field="quad_order", value=order)
    return _leggauss(int(order))


def integrate(fn: Callable[[np.ndarray], np.ndarray], order: int = DEFAULT_QUAD_ORDER):
    """∫₋π⁰ fn(u) du квадратурой Гаусса–Лежандра"""
    nodes, weights = gauss_legendre(order)
    return np.dot(weights, fn(nodes))


def uniform_nodes(n_interior: int) -> ArrayR:
    """Равномерная сетка на [−π, 0] с n_interior внутренними узлами и обоими концами"""
    if n_interior < 1:
        raise GridTooCoarseError("grid needs at least one interior node", nodes=n_interior, required=1)
    return np.linspace(-math.pi, 0.0, n_interior + 2)


@dataclass(frozen=True)
class GridField:
    """Поле на упорядоченной сетке [−π, 0] с нулевыми значениями на концах (условие Дирихле)"""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values)
        if nodes.ndim != 1 or nodes.size < 3:
            raise GridTooCoarseError("grid field needs at least 3 nodes", nodes=int(nodes.size), required=3)
        if values.shape != nodes.shape:
            raise DomainError("values and nodes must have the same shape", field="values")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("grid nodes must be strictly increasing", field="nodes")
        if not (math.isclose(nodes[0], -math.pi, abs_tol=1e-12) and math.isclose(nodes[-1], 0.0, abs_tol=1e-12)):
            raise DomainError("grid must span [-pi, 0]", field="nodes")
        if values[0] != 0 or values[-1] != 0:
            raise DomainError("grid field violates Dirichlet boundary condition", field="values")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n_interior: int) -> "GridField":
        nodes = uniform_nodes(n_interior)
        values = np.array(fn(nodes))
        values[0] = 0.0
        values[-1] = 0.0
        return cls(nodes=nodes, values=values)

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def interior_count(self) -> int:
        return int(self.nodes.size - 2)

    def is_uniform(self) -> bool:
        steps = np.diff(self.nodes)
        return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))


def basis_fn(n: int, u):
    """φ_n(u) = √(2/π)·sin(nu)"""
    n = mode_index(n)
    arr = _check_angle(u)
    values = SQRT_2_OVER_PI * np.sin(n * arr)
    return float(values) if np.ndim(u) == 0 else values


def _lambda_sq(n: np.ndarray, omega: complex, dc: DerivedConstants) -> np.ndarray:
    ratio = omega / dc.omega_l
    eps_ratio = dc.eps_tilde / dc.omega_l
    lam = (n * n) * eps_ratio * eps_ratio - ratio * ratio
    return np.where(n == 1, 1.0 - ratio * ratio, lam)


def eigenvalue_sq(n: int, omega: Freq, dc: DerivedConstants):
    """λ_n²(ω): 1 − ω²/ω_ℓ² при n = 1, n²ε̃²/ω_ℓ² − ω²/ω_ℓ² при n ≥ 2"""
    n = mode_index(n)
    w = _complex_omega(omega)
    value = complex(_lambda_sq(np.array([n]), w, dc)[0])
    return value.real if value.imag == 0.0 else value


def apply_L(
    omega: Freq,
    field: GridField,
    dc: DerivedConstants,
    params: ModelParams,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> GridField:
    """Применяет L_ω = (ε̃²/ω_ℓ²)∂²_u + ω²/ω_ℓ² − Ṽ_c²·φ_1(u)∫φ_1(u′)(…)du′.

    Вторая производная: центральные разности на равномерной сетке; интеграл
    проектора: Гаусс–Лежандр по кубическому сплайну поля.
    """
    if field.interior_count < MIN_INTERIOR_NODES:
        raise GridTooCoarseError(
            f"grid too coarse: {field.interior_count} interior nodes, need >= {MIN_INTERIOR_NODES}",
            nodes=field.interior_count,
            required=MIN_INTERIOR_NODES,
        )
    if not field.is_uniform():
        raise DomainError("apply_L requires a uniform grid", field="nodes")

    w = _complex_omega(omega)
    ratio_sq = (w / params.omega_l) ** 2
    if ratio_sq.imag == 0.0:
        ratio_sq = ratio_sq.real
    eps_sq = (dc.eps_tilde / params.omega_l) ** 2
    h = field.spacing
    phi = field.values

    out = np.zeros_like(phi, dtype=np.result_type(phi, ratio_sq))
    second = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / (h * h)
    out[1:-1] = eps_sq * second + ratio_sq * phi[1:-1]

    if params.vtilde_c != 0.0:
        overlap = _projector_overlap(field, quad_order)
        out[1:-1] -= params.vtilde_c**2 * overlap * SQRT_2_OVER_PI * np.sin(field.nodes[1:-1])

    return GridField(nodes=field.nodes, values=out)


def greens_function(
    omega: ComplexFrequency,
    u: float,
    uprime: float,
    dc: DerivedConstants,
    n_max: int = DEFAULT_N_MAX,
) -> complex:
    """G_ω(u, u′) = −Σ_{n=1}^{n_max} φ_n(u)φ_n(u′)/λ_n²(ω + iη)"""
    if n_max < 1:
        raise DomainError("n_max must be >= 1", field="n_max", value=n_max)
    _check_angle(u)
    _check_angle(uprime)
    w = _complex_omega(omega)
    n = np.arange(1, n_max + 1, dtype=float)
    lam = _lambda_sq(n, w, dc)
    if w.imag == 0.0:
        _raise_on_real_pole(lam, w.real, dc)
    terms = (2.0 / math.pi) * np.sin(n * u) * np.sin(n * uprime) / lam
    return complex(-np.sum(terms))


def _raise_on_real_pole(lam: np.ndarray, omega: float, dc: DerivedConstants) -> None:
    hits = np.flatnonzero(np.abs(lam) <= POLE_TOLERANCE)
    if hits.size:
        n = int(hits[0]) + 1
        pole = dc.omega_l if n == 1 else n * dc.eps_tilde
        log.warning("pole_on_real_axis", omega=omega, mode=n, pole=pole)
        raise PoleOnRealAxisError(
            f"pole on real axis: omega = {omega!r} hits mode {n} at {pole!r}; use eta > 0",
            omega=omega,
            pole=pole,
        )


def eigen_residual(
    n: int,
    omega: float,
    dc: DerivedConstants,
    params: ModelParams,
    n_interior: int,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> float:
    """‖L_ω φ_n + λ_n²φ_n‖_∞ / (max(1, |λ_n²|)·‖φ_n‖_∞) на равномерной сетке"""
    n = mode_index(n)
    field = GridField.from_function(lambda u: SQRT_2_OVER_PI * np.sin(n * u), n_interior)
    lam = eigenvalue_sq(n, omega, dc)
    image = apply_L(omega, field, dc, params, quad_order)
    residual = np.max(np.abs(image.values + lam * field.values))
    scale = max(1.0, abs(lam)) * np.max(np.abs(field.values))
    return float(residual / scale)


def convergence_ratio(
    n: int,
    omega: float,
    dc: DerivedConstants,
    params: ModelParams,
    n_interior: int,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> float:
    """Отношение невязок при шаге h и h/2 (для второго порядка ≈ 4)"""
    coarse = eigen_residual(n, omega, dc, params, n_interior, quad_order)
    fine = eigen_residual(n, omega, dc, params, 2 * (n_interior + 1) - 1, quad_order)
    return coarse / fine


def _projector_overlap(field: GridField, quad_order: int):
    """∫φ_1(u)φ(u)du по сплайну поля; вещественная и мнимая части интерполируются раздельно"""
    nodes, weights = gauss_legendre(quad_order)
    kernel = weights * SQRT_2_OVER_PI * np.sin(nodes)
    values = field.values
    overlap = np.dot(kernel, CubicSpline(field.nodes, values.real)(nodes))
    if np.iscomplexobj(values):
        overlap = overlap + 1j * np.dot(kernel, CubicSpline(field.nodes, values.imag)(nodes))
    return overlap
