"""Неоднородная подвижность μ(z, z₀; ω): сумма по модам, замкнутая форма,
однородное среднее (аналитически и квадратурой) и поиск резонансов.

Все ω-зависимые множители вычисляются при комплексной частоте ω + iη;
при γ > 0 знаменатели получают добавку −iγω (сравнение с оракулом).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np
import structlog
from scipy.signal import find_peaks

from trap_kohn.services.frequency import ComplexFrequency
from trap_kohn.services.geometry import envelope, u_of_z
from trap_kohn.services.model import DerivedConstants, ModelParams
from trap_kohn.services.spectral import DEFAULT_N_MAX, DEFAULT_QUAD_ORDER, gauss_legendre
from trap_kohn.utils.exceptions import ClosedFormSingularError, DomainError, PoleOnRealAxisError
from trap_kohn.utils.parallel import parallel_map

log = structlog.get_logger(__name__)

__all__ = [
    "Method",
    "MobilitySample",
    "MobilitySpectrum",
    "mobility_modesum",
    "mobility_damped",
    "mobility_closed",
    "mobility_homogeneous_analytic",
    "mobility_homogeneous_quadrature",
    "resonance_scan",
    "expected_peaks",
    "nearest_pole",
    "is_near_pole",
    "scan_spectrum",
    "compare_spectrum",
    "homogeneous_spectrum",
    "NEAR_POLE_FACTOR",
]

# |ω − полюс| < NEAR_POLE_FACTOR·η: замкнутая форма считается ненадёжной
NEAR_POLE_FACTOR = 10.0
SINGULAR_TOLERANCE = 1e-12
# блок узлов при векторной сумме по модам
_CHUNK_ELEMENTS = 4_000_000


class Method(str, Enum):
    MODE_SUM = "mode_sum"
    CLOSED_FORM = "closed_form"
    HOMOGENEOUS_ANALYTIC = "homogeneous_analytic"
    HOMOGENEOUS_QUADRATURE = "homogeneous_quadrature"
    TIME_DOMAIN = "time_domain"


@dataclass(frozen=True)
class MobilitySample:
    """Значение подвижности с происхождением"""

    z: float
    z0: Optional[float]
    freq: ComplexFrequency
    value: complex
    method: Method
    near_pole: bool = False
    rel_diff: Optional[float] = None


@dataclass(frozen=True)
class MobilitySpectrum:
    """Упорядоченные по частоте отсчёты и снимок параметров"""

    samples: tuple
    params: ModelParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        omegas = [s.freq.omega for s in self.samples]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise DomainError("frequency grid must be strictly increasing", field="omega")

    @property
    def omegas(self) -> np.ndarray:
        return np.array([s.freq.omega for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples], dtype=complex)


def _damped_square(w: complex, gamma: float) -> complex:
    # ω² + iγω, так что знаменатель Ω² − ω² − iγω
    return w * w + 1j * gamma * w


def _check_real_poles(freq: ComplexFrequency, dc: DerivedConstants, n_max: int, include_modes: bool = True) -> None:
    if freq.eta > 0.0 or freq.gamma > 0.0:
        return
    omega = abs(freq.omega)
    if omega == 0.0:
        return
    if math.isclose(omega, dc.omega_l, rel_tol=SINGULAR_TOLERANCE):
        raise PoleOnRealAxisError(
            f"pole on real axis: omega = {freq.omega!r} at omega_l", omega=freq.omega, pole=dc.omega_l
        )
    if include_modes:
        n = round(omega / dc.eps_tilde)
        if 2 <= n <= n_max and math.isclose(omega, n * dc.eps_tilde, rel_tol=SINGULAR_TOLERANCE):
            raise PoleOnRealAxisError(
                f"pole on real axis: omega = {freq.omega!r} at {n}*eps_tilde",
                omega=freq.omega,
                pole=n * dc.eps_tilde,
            )


def _mode_sum_angles(
    u: float,
    u0: np.ndarray,
    freq: ComplexFrequency,
    params: ModelParams,
    dc: DerivedConstants,
    n_max: int,
) -> np.ndarray:
    """Сумма по модам для одной точки наблюдения u и массива точек приложения силы u0"""
    w = freq.value
    w2 = _damped_square(w, freq.gamma)
    hb = params.hbar
    wl = params.omega_l
    eps = dc.eps_tilde

    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    kohn = -(2j * w * wl / (math.pi**2 * hb)) * (np.sin(u) * np.sin(u0)) / (wl * wl - w2)

    n = np.arange(2, n_max + 1, dtype=float)
    weights = np.sin(n * u) / (n * n * eps * eps - w2)
    total = np.empty(u0.shape, dtype=complex)
    rows = max(1, _CHUNK_ELEMENTS // max(n.size, 1))
    for start in range(0, u0.size, rows):
        block = u0[start : start + rows]
        total[start : start + rows] = np.sin(np.outer(block, n)) @ weights
    modes = -(2j * w * eps * dc.k_lutt / (math.pi**2 * hb)) * total
    return kohn + modes


def _angles(z: float, z0: float, params: ModelParams) -> tuple[float, float]:
    return u_of_z(z, params.l_fermi), u_of_z(z0, params.l_fermi)


def mobility_modesum(
    z: float,
    z0: float,
    freq: ComplexFrequency,
    params: ModelParams,
    dc: DerivedConstants,
    n_max: int = DEFAULT_N_MAX,
) -> complex:
    """μ(z, z₀; ω) как сумма вклада моды Кона и мод n = 2…n_max"""
    if n_max < 2:
        raise DomainError("n_max must be >= 2", field="n_max", value=n_max)
    u, u0 = _angles(z, z0, params)
    _check_real_poles(freq, dc, n_max)
    return complex(_mode_sum_angles(u, np.array([u0]), freq, params, dc, n_max)[0])


def mobility_damped(
    z: float,
    z0: float,
    omega: float,
    gamma: float,
    params: ModelParams,
    dc: DerivedConstants,
    n_max: int = DEFAULT_N_MAX,
) -> complex:
    """Сумма по модам с затуханием: знаменатели n²ε̃² − ω² − iγω и ω_ℓ² − ω² − iγω"""
    return mobility_modesum(z, z0, ComplexFrequency(omega=omega, eta=0.0, gamma=gamma), params, dc, n_max)


def mobility_closed(
    z: float,
    z0: float,
    freq: ComplexFrequency,
    params: ModelParams,
    dc: DerivedConstants,
) -> complex:
    """Замкнутая форма суммы по модам с a = (ω + iη)/ε̃ и поправкой моды Кона"""
    u, u0 = _angles(z, z0, params)
    w = freq.value
    a = w / dc.eps_tilde
    sin_pa = np.sin(math.pi * a)
    if freq.eta == 0.0 and abs(sin_pa) < SINGULAR_TOLERANCE * max(1.0, abs(a)):
        log.warning("closed_form_singular", omega=freq.omega, a=a.real)
        raise ClosedFormSingularError(
            "closed form singular; use mode sum near resonance",
            omega=freq.omega,
            pole=round(a.real) * dc.eps_tilde,
        )
    _check_real_poles(freq, dc, n_max=1, include_modes=False)

    v = params.vtilde_c
    hb = params.hbar
    wl = params.omega_l
    bracket = np.cos(a * (math.pi + u + u0)) - np.cos(a * (math.pi - abs(u - u0)))
    first = -(1j * dc.k_lutt / (2.0 * math.pi * hb * sin_pa)) * bracket

    zz = envelope(z, params.l_fermi) * envelope(z0, params.l_fermi)
    w2 = w * w
    kohn = 1j * w * wl * ((1.0 + v) * wl * wl - w2) / ((wl * wl - w2) * ((1.0 - v * v) * wl * wl - w2))
    second = (2.0 * v * zz / (math.pi**2 * hb)) * kohn
    return complex(first + second)


def mobility_homogeneous_analytic(
    z: float,
    freq: ComplexFrequency,
    params: ModelParams,
    dc: DerivedConstants,
) -> complex:
    """Однородная подвижность (L_F/πħ)·iωω_ℓ/(ω² − ω_ℓ²)·Z(z); от Ṽ_c не зависит"""
    zz = envelope(z, params.l_fermi)
    _check_real_poles(freq, dc, n_max=1, include_modes=False)
    w = freq.value
    wl = params.omega_l
    return complex((params.l_fermi / (math.pi * params.hbar)) * 1j * w * wl / (w * w - wl * wl) * zz)


def mobility_homogeneous_quadrature(
    z: float,
    freq: ComplexFrequency,
    params: ModelParams,
    dc: DerivedConstants,
    quad_order: int = DEFAULT_QUAD_ORDER,
    n_max: Optional[int] = None,
) -> complex:
    """−L_F∫₋π⁰ du₀ sin(u₀)·μ(z, z₀(u₀); ω) квадратурой Гаусса–Лежандра по сумме мод.

    Порядок квадратуры поднимается до 2·n_max, чтобы разрешить все удержанные моды;
    по умолчанию n_max = quad_order // 2.
    """
    if n_max is None:
        n_max = max(2, quad_order // 2)
    if n_max < 2:
        raise DomainError("n_max must be >= 2", field="n_max", value=n_max)
    order = max(quad_order, 2 * n_max)
    if order != quad_order:
        log.info("homogeneous_quadrature_order_raised", requested=quad_order, used=order, n_max=n_max)

    u = u_of_z(z, params.l_fermi)
    _check_real_poles(freq, dc, n_max)
    nodes, weights = gauss_legendre(order)
    values = _mode_sum_angles(u, nodes, freq, params, dc, n_max)
    return complex(-params.l_fermi * np.dot(weights * np.sin(nodes), values))


def nearest_pole(omega: float, params: ModelParams, dc: DerivedConstants) -> float:
    """Ближайшая к ω собственная частота из {ω_ℓ} ∪ {nε̃, n ≥ 2}"""
    omega = abs(omega)
    n = max(2, round(omega / dc.eps_tilde))
    candidates = [params.omega_l, n * dc.eps_tilde]
    if n > 2:
        candidates.append((n - 1) * dc.eps_tilde)
    return min(candidates, key=lambda p: abs(p - omega))


def is_near_pole(freq: ComplexFrequency, params: ModelParams, dc: DerivedConstants, factor: float = NEAR_POLE_FACTOR) -> bool:
    """|ω − полюс| < factor·η (при η = 0: только точное попадание)"""
    pole = nearest_pole(freq.omega, params, dc)
    distance = abs(abs(freq.omega) - pole)
    if freq.eta == 0.0:
        return math.isclose(distance, 0.0, abs_tol=SINGULAR_TOLERANCE * pole)
    return distance < factor * freq.eta


def expected_peaks(
    z: float,
    z0: float,
    omega_max: float,
    params: ModelParams,
    dc: DerivedConstants,
    weight_tolerance: float = 1e-9,
) -> List[float]:
    """Положения резонансов с ненулевым весом sin(nu₀(z))·sin(nu₀(z₀)) до omega_max"""
    u, u0 = _angles(z, z0, params)
    peaks: List[float] = []
    if params.omega_l <= omega_max and abs(np.sin(u) * np.sin(u0)) > weight_tolerance:
        peaks.append(params.omega_l)
    n = 2
    while n * dc.eps_tilde <= omega_max:
        if abs(np.sin(n * u) * np.sin(n * u0)) > weight_tolerance:
            peaks.append(n * dc.eps_tilde)
        n += 1
    return sorted(peaks)


def _check_grid(omega_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(list(omega_grid), dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise DomainError("frequency grid is empty or degenerate", field="omega_grid")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("frequency grid must be strictly increasing", field="omega_grid")
    return grid


def scan_spectrum(
    z: float,
    z0: float,
    omega_grid: Iterable[float],
    params: ModelParams,
    dc: DerivedConstants,
    eta: float,
    method: Method = Method.MODE_SUM,
    n_max: int = DEFAULT_N_MAX,
    threads: Optional[int] = None,
) -> MobilitySpectrum:
    """Спектр μ(z, z₀; ω) по сетке; вблизи полюсов замкнутая форма заменяется суммой по модам"""
    grid = np.asarray(list(omega_grid), dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0.0):
        raise DomainError("frequency grid must be non-empty and strictly increasing", field="omega_grid")
    method = Method(method)

    def _sample(omega: float) -> MobilitySample:
        freq = ComplexFrequency(omega=float(omega), eta=eta)
        near = is_near_pole(freq, params, dc)
        if method is Method.CLOSED_FORM and not near:
            try:
                value = mobility_closed(z, z0, freq, params, dc)
            except ClosedFormSingularError:
                # целое a при η = 0: формула 0/0, сумма мод конечна
                log.warning("closed_form_singular_fallback", omega=omega, a=omega / dc.eps_tilde)
            else:
                return MobilitySample(z=z, z0=z0, freq=freq, value=value, method=Method.CLOSED_FORM)
        elif method is Method.CLOSED_FORM:
            log.warning("near_pole_closed_form_unreliable", omega=omega, pole=nearest_pole(omega, params, dc))
        value = mobility_modesum(z, z0, freq, params, dc, n_max)
        return MobilitySample(z=z, z0=z0, freq=freq, value=value, method=Method.MODE_SUM, near_pole=near)

    samples = parallel_map(_sample, grid, threads)
    log.info("spectrum_scanned", points=len(samples), method=method.value, z=z, z0=z0)
    return MobilitySpectrum(samples=tuple(samples), params=params, meta={"n_max": n_max, "eta": eta})


def compare_spectrum(
    z: float,
    z0: float,
    omega_grid: Iterable[float],
    params: ModelParams,
    dc: DerivedConstants,
    eta: float,
    n_max: int = DEFAULT_N_MAX,
    threads: Optional[int] = None,
) -> MobilitySpectrum:
    """Замкнутая форма против суммы мод: rel_diff = |μ_closed − μ_sum|/|μ_closed| на каждой частоте"""
    grid = np.asarray(list(omega_grid), dtype=float)

    def _sample(omega: float) -> MobilitySample:
        freq = ComplexFrequency(omega=float(omega), eta=eta)
        summed = mobility_modesum(z, z0, freq, params, dc, n_max)
        near = is_near_pole(freq, params, dc)
        try:
            closed = mobility_closed(z, z0, freq, params, dc)
        except ClosedFormSingularError:
            return MobilitySample(z=z, z0=z0, freq=freq, value=summed, method=Method.MODE_SUM, near_pole=True)
        rel = abs(closed - summed) / abs(closed) if closed != 0 else abs(summed)
        if near:
            return MobilitySample(
                z=z, z0=z0, freq=freq, value=summed, method=Method.MODE_SUM, near_pole=True, rel_diff=rel
            )
        return MobilitySample(z=z, z0=z0, freq=freq, value=closed, method=Method.CLOSED_FORM, rel_diff=rel)

    samples = parallel_map(_sample, grid, threads)
    worst = max((s.rel_diff for s in samples if s.rel_diff is not None and not s.near_pole), default=0.0)
    log.info("closed_vs_sum_compared", points=len(samples), max_rel_diff=worst)
    return MobilitySpectrum(
        samples=tuple(samples), params=params, meta={"n_max": n_max, "eta": eta, "max_rel_diff": worst}
    )


def homogeneous_spectrum(
    z: float,
    omega_grid: Iterable[float],
    params: ModelParams,
    dc: DerivedConstants,
    eta: float,
    quad_order: int = DEFAULT_QUAD_ORDER,
    n_max: Optional[int] = None,
    threads: Optional[int] = None,
) -> MobilitySpectrum:
    """Однородная подвижность квадратурой; rel_diff: отклонение от аналитического результата"""
    grid = np.asarray(list(omega_grid), dtype=float)

    def _sample(omega: float) -> MobilitySample:
        freq = ComplexFrequency(omega=float(omega), eta=eta)
        quad = mobility_homogeneous_quadrature(z, freq, params, dc, quad_order, n_max)
        exact = mobility_homogeneous_analytic(z, freq, params, dc)
        rel = abs(quad - exact) / abs(exact) if exact != 0 else abs(quad)
        return MobilitySample(
            z=z,
            z0=None,
            freq=freq,
            value=quad,
            method=Method.HOMOGENEOUS_QUADRATURE,
            near_pole=is_near_pole(freq, params, dc),
            rel_diff=rel,
        )

    samples = parallel_map(_sample, grid, threads)
    worst = max((s.rel_diff for s in samples if s.rel_diff is not None), default=0.0)
    log.info("homogeneous_compared", points=len(samples), max_rel_diff=worst, z=z)
    return MobilitySpectrum(samples=tuple(samples), params=params, meta={"eta": eta, "max_rel_diff": worst})


def resonance_scan(
    z: float,
    z0: float,
    omega_grid: Sequence[float],
    params: ModelParams,
    dc: DerivedConstants,
    n_max: int = DEFAULT_N_MAX,
    eta: Optional[float] = None,
    threads: Optional[int] = None,
) -> List[float]:
    """Локальные максимумы |μ(z, z₀; ω)| на сетке; η по умолчанию 10⁻³·ω_ℓ"""
    grid = _check_grid(omega_grid)
    if eta is None:
        eta = 1e-3 * params.omega_l
    if eta <= 0.0:
        raise DomainError("resonance scan requires eta > 0", field="eta", value=eta)
    spacing = float(np.max(np.diff(grid)))
    if spacing >= dc.eps_tilde / 20.0:
        raise DomainError(
            f"grid spacing {spacing!r} must be < eps_tilde/20 = {dc.eps_tilde / 20.0!r}",
            field="omega_grid",
            value=spacing,
        )
    spectrum = scan_spectrum(z, z0, grid, params, dc, eta, Method.MODE_SUM, n_max, threads)
    magnitude = np.abs(spectrum.values)
    indices, _ = find_peaks(magnitude)
    peaks = [float(grid[i]) for i in indices]
    log.info("resonances_found", peaks=peaks, z=z, z0=z0)
    return peaks
