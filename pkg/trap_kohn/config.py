"""
Конфигурация приложения: окружение (pydantic-settings) и конфигурация запуска (JSON + флаги CLI)
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import orjson
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from trap_kohn.services.frequency import DEFAULT_ETA_FACTOR, DEFAULT_GAMMA_FACTOR
from trap_kohn.services.model import ModelParams
from trap_kohn.utils.exceptions import ConfigurationError


class Settings(BaseSettings):
    """Настройки окружения"""

    # Настройка для загрузки .env файла
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )

    # Logging
    log_level: str = Field("INFO", validation_alias="LOG_LEVEL")
    log_format: Literal["console", "json"] = Field("console", validation_alias="LOG_FORMAT")
    log_file: Optional[str] = Field(None, validation_alias="LOG_FILE")

    # Параллелизм: 0 = по числу процессоров
    threads: int = Field(0, ge=0, validation_alias="TRAP_KOHN_THREADS")


def get_settings() -> Settings:
    """Получить настройки окружения"""
    return Settings()


settings = get_settings()


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSection(_Section):
    """Параметры модели; omega_l, l_fermi, hbar задают единицы CLI"""

    vtilde_c: float = 0.0
    omega_l: float = Field(1.0, gt=0.0)
    l_fermi: float = Field(1.0, gt=0.0)
    hbar: float = Field(1.0, gt=0.0)
    n_particles: Optional[int] = Field(None, ge=1)
    alpha: Optional[float] = Field(None, gt=0.0)

    @model_validator(mode="after")
    def _check_params(self) -> "ModelSection":
        # ModelUnstableError и DomainError пробрасываются как есть
        self.to_params()
        return self

    def to_params(self) -> ModelParams:
        """Собирает ModelParams; при заданных N и α длина L_F выводится как √(2N)/α"""
        if self.n_particles is not None and self.alpha is not None:
            return ModelParams.from_oscillator(
                self.vtilde_c, self.n_particles, self.alpha, omega_l=self.omega_l, hbar=self.hbar
            )
        return ModelParams(vtilde_c=self.vtilde_c, omega_l=self.omega_l, l_fermi=self.l_fermi, hbar=self.hbar)


class NumericsSection(_Section):
    """Численные настройки; eta и gamma в единицах ω_ℓ"""

    n_max: int = Field(10_000, ge=2)
    quad_order: int = Field(64, ge=2)
    eta: float = Field(DEFAULT_ETA_FACTOR, ge=0.0)
    gamma: float = Field(DEFAULT_GAMMA_FACTOR, ge=0.0)
    grid_nodes: int = Field(511, ge=8)
    dt: Optional[float] = Field(None, gt=0.0)
    delta_kind: Literal["nearest", "linear"] = "linear"
    amplitude: float = Field(1.0, gt=0.0)
    # шаг снимков поля для файла траектории
    record_every: int = Field(10, ge=1)


class TaskSection(_Section):
    """Аргументы задачи; координаты в единицах L_F, частоты в единицах ω_ℓ"""

    z: float = 0.0
    z0: float = 0.0
    omega: float = 0.5
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    omega_step: Optional[float] = None
    omegas: Optional[List[float]] = None
    method: Literal["mode_sum", "closed_form"] = "mode_sum"
    homogeneous: bool = False
    compare: bool = False
    modes: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    scheme: Optional[Literal["none", "project_out", "renormalize_trap"]] = None

    @field_validator("omegas")
    @classmethod
    def _check_increasing(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None:
            if len(value) == 0:
                raise ValueError("frequency grid is empty")
            if any(b <= a for a, b in zip(value, value[1:])):
                raise ValueError("frequency grid must be strictly increasing")
        return value

    @field_validator("modes")
    @classmethod
    def _check_modes(cls, value: List[int]) -> List[int]:
        if not value or any(m < 1 for m in value):
            raise ValueError("modes must be positive integers")
        return value

    def frequency_grid(self) -> List[float]:
        """Частотная сетка: явный список, [omega_min, omega_max] с шагом omega_step или одна частота omega"""
        if self.omegas is not None:
            return list(self.omegas)
        if self.omega_min is None and self.omega_max is None and self.omega_step is None:
            return [self.omega]
        if self.omega_min is None or self.omega_max is None or self.omega_step is None:
            raise ConfigurationError("frequency grid requires omegas or omega_min/omega_max/omega_step")
        if self.omega_step <= 0.0 or self.omega_max <= self.omega_min:
            raise ConfigurationError(
                "frequency grid must be increasing",
                omega_min=self.omega_min,
                omega_max=self.omega_max,
                omega_step=self.omega_step,
            )
        count = int(round((self.omega_max - self.omega_min) / self.omega_step)) + 1
        return [self.omega_min + k * self.omega_step for k in range(count)]


class OutputSection(_Section):
    """Куда и в каком формате писать результат; path = None означает stdout"""

    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    # CSV траектории для oracle timedomain
    trajectory: Optional[str] = None


class RunConfig(_Section):
    """Полная конфигурация запуска"""

    model: ModelSection = Field(default_factory=ModelSection)
    numerics: NumericsSection = Field(default_factory=NumericsSection)
    task: TaskSection = Field(default_factory=TaskSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="before")
    @classmethod
    def _merge_units(cls, data: Any) -> Any:
        # блок units переопределяет единицы модели
        if isinstance(data, dict) and "units" in data:
            data = dict(data)
            units = data.pop("units") or {}
            model = dict(data.get("model") or {})
            model.update({k: v for k, v in units.items() if k in ("omega_l", "l_fermi", "hbar")})
            data["model"] = model
        return data

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        """Загружает JSON-конфигурацию с ключами model, numerics, task, output"""
        try:
            raw = orjson.loads(Path(path).read_bytes())
        except orjson.JSONDecodeError as e:
            raise ConfigurationError(f"invalid JSON config: {e}", path=str(path)) from e
        if not isinstance(raw, dict):
            raise ConfigurationError("config root must be an object", path=str(path))
        return cls.model_validate(raw)

    def merged(self, overrides: Dict[str, Dict[str, Any]]) -> "RunConfig":
        """Новая конфигурация с наложенными флагами CLI (значения None пропускаются)"""
        data = self.model_dump()
        for section, values in overrides.items():
            for key, value in values.items():
                if value is not None:
                    data[section][key] = value
        return RunConfig.model_validate(data)
