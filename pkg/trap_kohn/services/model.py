"""Параметры модели и перенормированные константы.

Примитивная константа связи: Ṽ_c (знаковая, |Ṽ_c| < 1); голая V_c дальше
не используется. Внутренние единицы по умолчанию ħ = ω_ℓ = L_F = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import structlog

from trap_kohn.utils.exceptions import DomainError, ModelUnstableError
from trap_kohn.utils.types import Dimensionless, Frequency, Length

log = structlog.get_logger(__name__)

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "IdentityResiduals",
    "derive_constants",
    "check_identities",
    "renormalized_trap_frequency",
]


def _check_coupling(vtilde_c: float) -> None:
    if not math.isfinite(vtilde_c) or abs(vtilde_c) >= 1.0:
        raise ModelUnstableError(
            f"model unstable / K divergent: |Ṽ_c| = {abs(vtilde_c)!r} must be < 1",
            vtilde_c=vtilde_c,
        )


def _check_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}", field=name, value=value)


@dataclass(frozen=True)
class ModelParams:
    """Первичные физические входные данные"""

    vtilde_c: Dimensionless
    omega_l: Frequency = Frequency(1.0)
    l_fermi: Length = Length(1.0)
    hbar: float = 1.0
    n_particles: Optional[int] = None
    alpha: Optional[float] = None

    def __post_init__(self) -> None:
        _check_coupling(self.vtilde_c)
        _check_positive("omega_l", self.omega_l)
        _check_positive("l_fermi", self.l_fermi)
        _check_positive("hbar", self.hbar)

    @classmethod
    def from_oscillator(
        cls,
        vtilde_c: float,
        n_particles: int,
        alpha: float,
        omega_l: float = 1.0,
        hbar: float = 1.0,
    ) -> "ModelParams":
        """Строит параметры из числа фермионов N и обратной осцилляторной длины α: L_F = √(2N)/α"""
        if n_particles < 1:
            raise DomainError("n_particles must be >= 1", field="n_particles", value=n_particles)
        _check_positive("alpha", alpha)
        l_fermi = math.sqrt(2.0 * n_particles) / alpha
        return cls(
            vtilde_c=Dimensionless(vtilde_c),
            omega_l=Frequency(omega_l),
            l_fermi=Length(l_fermi),
            hbar=hbar,
            n_particles=n_particles,
            alpha=alpha,
        )

    @property
    def k_fermi(self) -> Optional[float]:
        """k_F = α√(2N), если заданы N и α"""
        if self.n_particles is None or self.alpha is None:
            return None
        return self.alpha * math.sqrt(2.0 * self.n_particles)


@dataclass(frozen=True)
class IdentityResiduals:
    """Относительные невязки тождеств модели"""

    # |ε̃(K − 1/K) − 2ω_ℓṼ_c| / ω_ℓ
    splitting: float
    # |ε̃K − ω_ℓ(1 + Ṽ_c)| / ω_ℓ
    product: float

    def max(self) -> float:
        return max(self.splitting, self.product)

    def as_tuple(self) -> tuple[float, float]:
        return (self.splitting, self.product)


@dataclass(frozen=True)
class DerivedConstants:
    """K, ε̃ и невязки; несёт ω_ℓ и Ṽ_c, чтобы спектральные функции были самодостаточны"""

    k_lutt: float
    eps_tilde: Frequency
    omega_l: Frequency
    vtilde_c: Dimensionless
    # относительная разница двух форм ε̃: 2K/(K²+1) и √(1−Ṽ_c²)
    eps_form_residual: float
    identity_residuals: Optional[IdentityResiduals] = None


def derive_constants(params: ModelParams) -> DerivedConstants:
    """Вычисляет K = √((1+Ṽ_c)/(1−Ṽ_c)) и ε̃ = ω_ℓ√(1−Ṽ_c²)"""
    v = params.vtilde_c
    _check_coupling(v)

    k_lutt = math.sqrt((1.0 + v) / (1.0 - v))
    eps_sqrt = params.omega_l * math.sqrt((1.0 - v) * (1.0 + v))
    eps_ratio = params.omega_l * 2.0 * k_lutt / (k_lutt * k_lutt + 1.0)
    eps_form_residual = abs(eps_sqrt - eps_ratio) / eps_sqrt

    dc = DerivedConstants(
        k_lutt=k_lutt,
        eps_tilde=Frequency(eps_sqrt),
        omega_l=params.omega_l,
        vtilde_c=v,
        eps_form_residual=eps_form_residual,
    )
    dc = replace(dc, identity_residuals=check_identities(dc, params))
    log.debug(
        "constants_derived",
        vtilde_c=v,
        k_lutt=k_lutt,
        eps_tilde=dc.eps_tilde,
        eps_form_residual=eps_form_residual,
    )
    return dc


def check_identities(dc: DerivedConstants, params: ModelParams) -> IdentityResiduals:
    """Невязки тождеств ε̃(K − 1/K) = 2ω_ℓṼ_c и ε̃K = ω_ℓ(1 + Ṽ_c)"""
    w = params.omega_l
    v = params.vtilde_c
    splitting = abs(dc.eps_tilde * (dc.k_lutt - 1.0 / dc.k_lutt) - 2.0 * w * v) / w
    product = abs(dc.eps_tilde * dc.k_lutt - w * (1.0 + v)) / w
    return IdentityResiduals(splitting=splitting, product=product)


def renormalized_trap_frequency(params: ModelParams) -> Frequency:
    """Селективно перенормированная частота ловушки ω̃_ℓ = ω_ℓ√(1+Ṽ_c²) для моды m = 1"""
    return Frequency(params.omega_l * math.sqrt(1.0 + params.vtilde_c**2))
