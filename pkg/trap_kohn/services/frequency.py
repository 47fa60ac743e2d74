"""Комплексная частота внешней силы с явным регуляризующим сдвигом η и затуханием γ"""

from __future__ import annotations

import math
from dataclasses import dataclass

from trap_kohn.utils.exceptions import DomainError

__all__ = ["ComplexFrequency", "DEFAULT_ETA_FACTOR", "DEFAULT_GAMMA_FACTOR"]

# η по умолчанию в единицах ω_ℓ
DEFAULT_ETA_FACTOR = 1e-6
# γ по умолчанию для осцилляторного оракула, в единицах ω_ℓ
DEFAULT_GAMMA_FACTOR = 0.05


@dataclass(frozen=True)
class ComplexFrequency:
    """ω + iη; γ используется только при сравнении с оракулом во временной области"""

    omega: float
    eta: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.omega):
            raise DomainError("omega must be finite", field="omega", value=self.omega)
        if not math.isfinite(self.eta) or self.eta < 0.0:
            raise DomainError("eta must be >= 0", field="eta", value=self.eta)
        if not math.isfinite(self.gamma) or self.gamma < 0.0:
            raise DomainError("gamma must be >= 0", field="gamma", value=self.gamma)

    @classmethod
    def regularized(cls, omega: float, omega_l: float, eta_factor: float = DEFAULT_ETA_FACTOR) -> "ComplexFrequency":
        """Частота со сдвигом η = eta_factor·ω_ℓ"""
        return cls(omega=float(omega), eta=eta_factor * omega_l)

    @property
    def value(self) -> complex:
        return complex(self.omega, self.eta)
