"""Спектральный оракул Боголюбова для квадратичной формы одной моды.

H_m = ħΩ_m d†d + (ħg_m/2)(d² + d†²), Ω_m = mω_ℓ, g_m = mω_ℓṼ_c.
Диагонализация алгоритмом Колпы (разложение Холецкого + eigh) для матрицы
[[Ω, g], [g, Ω]] в базисе (d, d†); частота моды √(Ω² − g²).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List

import numpy as np
import structlog
from numpy.linalg import LinAlgError, eigh
from scipy.linalg import block_diag, cholesky

from trap_kohn.services.model import ModelParams, renormalized_trap_frequency
from trap_kohn.utils.exceptions import DomainError, ModeUnstableError
from trap_kohn.utils.types import Frequency

log = structlog.get_logger(__name__)

__all__ = ["Scheme", "BogoliubovResult", "mode_coefficients", "colpa_frequency", "bogoliubov_mode", "bogoliubov_table"]


class Scheme(str, Enum):
    """Способ обращения с парной частью взаимодействия в моде Кона (m = 1)"""

    NONE = "none"
    PROJECT_OUT = "project_out"
    RENORMALIZE_TRAP = "renormalize_trap"


@dataclass(frozen=True)
class BogoliubovResult:
    mode_index: int
    frequency: Frequency
    squeeze_param: float
    scheme: Scheme
    bare_frequency: float
    pairing: float


def mode_coefficients(m: int, params: ModelParams, scheme: Scheme) -> tuple[float, float]:
    """(Ω_m, g_m) с учётом схемы вычитания; схемы действуют только на m = 1"""
    if int(m) != m or m < 1:
        raise DomainError(f"mode index must be >= 1, got {m!r}", field="m", value=m)
    scheme = Scheme(scheme)
    omega_m = m * params.omega_l
    g_m = m * params.omega_l * params.vtilde_c
    if m == 1 and scheme is Scheme.PROJECT_OUT:
        g_m = 0.0
    elif m == 1 and scheme is Scheme.RENORMALIZE_TRAP:
        omega_m = renormalized_trap_frequency(params)
    return omega_m, g_m


def colpa_frequency(omega_m: float, g_m: float) -> float:
    """Положительное собственное значение σ_z·H для H = [[Ω, g], [g, Ω]]"""
    h = np.array([[omega_m, g_m], [g_m, omega_m]], dtype=float)
    try:
        k = cholesky(h)
    except LinAlgError as e:
        raise ModeUnstableError(f"mode unstable: |g| = {abs(g_m)!r} >= Omega = {omega_m!r}") from e
    bos = block_diag(np.eye(1), -np.eye(1))
    energies, _ = eigh(k @ bos @ k.T.conj())
    return float(energies[-1])


def bogoliubov_mode(m: int, params: ModelParams, scheme: Scheme = Scheme.NONE) -> BogoliubovResult:
    """Частота и параметр сжатия r = ½·artanh(g/Ω) для моды m"""
    scheme = Scheme(scheme)
    omega_m, g_m = mode_coefficients(m, params, scheme)
    if abs(g_m) >= omega_m:
        raise ModeUnstableError(f"mode unstable: |g_{m}| >= Omega_{m}", mode=m)
    frequency = colpa_frequency(omega_m, g_m)
    closed = math.sqrt((omega_m - g_m) * (omega_m + g_m))
    if not math.isclose(frequency, closed, rel_tol=1e-10):
        log.warning("bogoliubov_closed_form_mismatch", mode=m, colpa=frequency, closed=closed)
    squeeze = 0.5 * math.atanh(g_m / omega_m)
    log.debug("bogoliubov_mode_diagonalized", mode=m, scheme=scheme.value, frequency=frequency, squeeze=squeeze)
    return BogoliubovResult(
        mode_index=int(m),
        frequency=Frequency(frequency),
        squeeze_param=squeeze,
        scheme=scheme,
        bare_frequency=omega_m,
        pairing=g_m,
    )


def bogoliubov_table(modes: Iterable[int], params: ModelParams, schemes: Iterable[Scheme]) -> List[BogoliubovResult]:
    """Результаты для всех пар (схема, мода)"""
    return [bogoliubov_mode(m, params, s) for s in schemes for m in modes]
