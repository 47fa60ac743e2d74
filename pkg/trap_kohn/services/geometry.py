"""Отображение между формальной переменной u ∈ I_π = [−π, 0] и координатой z ∈ [−L_F, L_F].

u₀(z) = arcsin(z/L_F) − π/2 (главная ветвь), z = L_F·cos(u).
Функции принимают скаляры и массивы numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from trap_kohn.utils.exceptions import DomainError, OutsideFermiSeaError
from trap_kohn.utils.types import Angle, ArrayR, Length

__all__ = ["TrapCoordinate", "u_of_z", "z_of_u", "envelope", "kohn_density_profile"]

Scalar = Union[float, ArrayR]


def _check_inside(z: Scalar, l_fermi: float) -> np.ndarray:
    if l_fermi <= 0.0:
        raise DomainError("l_fermi must be positive", field="l_fermi", value=l_fermi)
    arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > l_fermi):
        worst = float(np.max(np.abs(arr))) if arr.size else float("nan")
        raise OutsideFermiSeaError(
            f"outside classical Fermi sea: |z| = {worst!r} > L_F = {l_fermi!r}",
            field="z",
            value=worst,
        )
    return arr


def _as_output(values: np.ndarray, like: Scalar):
    return float(values) if np.ndim(like) == 0 else values


def u_of_z(z: Scalar, l_fermi: float) -> Scalar:
    """u₀(z) = arcsin(z/L_F) − π/2, результат в [−π, 0]"""
    arr = _check_inside(z, l_fermi)
    u = np.arcsin(np.clip(arr / l_fermi, -1.0, 1.0)) - 0.5 * math.pi
    return _as_output(u, z)


def z_of_u(u: Scalar, l_fermi: float) -> Scalar:
    """z = L_F·cos(u) для u ∈ [−π, 0]"""
    arr = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -math.pi) or np.any(arr > 0.0):
        raise DomainError(f"u outside [-pi, 0]: {u!r}", field="u", value=float(np.min(arr)) if arr.size else None)
    if l_fermi <= 0.0:
        raise DomainError("l_fermi must be positive", field="l_fermi", value=l_fermi)
    return _as_output(l_fermi * np.cos(arr), u)


def envelope(z: Scalar, l_fermi: float) -> Scalar:
    """Огибающая Z(z) = √(1 − z²/L_F²) = −sin u₀(z)"""
    arr = _check_inside(z, l_fermi)
    ratio = arr / l_fermi
    return _as_output(np.sqrt(np.clip(1.0 - ratio * ratio, 0.0, None)), z)


def kohn_density_profile(z: Scalar, l_fermi: float) -> Scalar:
    """Форма модуляции плотности моды Кона δρ(z) ∝ z/√(1 − z²/L_F²); на краях |z| = L_F не определена"""
    arr = _check_inside(z, l_fermi)
    if np.any(np.abs(arr) >= l_fermi):
        raise DomainError("kohn density profile diverges at |z| = L_F", field="z", value=l_fermi)
    ratio = arr / l_fermi
    return _as_output(ratio / np.sqrt(1.0 - ratio * ratio), z)


@dataclass(frozen=True)
class TrapCoordinate:
    """Пара (z, u) с проверкой взаимной обратимости"""

    z: Length
    u: Angle

    @classmethod
    def from_z(cls, z: float, l_fermi: float) -> "TrapCoordinate":
        return cls(z=Length(float(z)), u=Angle(u_of_z(z, l_fermi)))

    @classmethod
    def from_u(cls, u: float, l_fermi: float) -> "TrapCoordinate":
        return cls(z=Length(z_of_u(u, l_fermi)), u=Angle(float(u)))
