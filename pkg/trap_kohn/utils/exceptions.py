"""
Кастомные исключения для численного ядра и CLI
"""


class TrapKohnError(Exception):
    """Базовая ошибка приложения"""

    def __init__(self, message: str, **kwargs):
        super().__init__(message)
        self.details = kwargs


class ModelUnstableError(TrapKohnError):
    """|Ṽ_c| ≥ 1: ε̃² ≤ 0, параметр Латтинжера расходится"""

    def __init__(self, message: str, vtilde_c: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.vtilde_c = vtilde_c


class DomainError(TrapKohnError):
    """Аргумент вне допустимого интервала"""

    def __init__(self, message: str, field: str = None, value: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.field = field
        self.value = value


class OutsideFermiSeaError(DomainError):
    """Координата |z| > L_F"""


class PoleOnRealAxisError(TrapKohnError):
    """Частота точно на полюсе при η = 0"""

    def __init__(self, message: str, omega: float = None, pole: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.omega = omega
        self.pole = pole


class ClosedFormSingularError(PoleOnRealAxisError):
    """Замкнутая формула сингулярна (целое a при η = 0)"""


class GridTooCoarseError(TrapKohnError):
    """Слишком грубая сетка"""

    def __init__(self, message: str, nodes: int = None, required: int = None, **kwargs):
        super().__init__(message, **kwargs)
        self.nodes = nodes
        self.required = required


class CFLViolationError(TrapKohnError):
    """Нарушено условие Куранта dt ≤ 0.5·h/ε̃"""

    def __init__(self, message: str, dt: float = None, limit: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.dt = dt
        self.limit = limit


class NumericalInstabilityError(TrapKohnError):
    """NaN или переполнение при интегрировании"""

    def __init__(self, message: str, step: int = None, time: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.step = step
        self.time = time


class TransientNotDecayedError(TrapKohnError):
    """Переходный процесс не затух к окну подгонки"""

    def __init__(self, message: str, residual: float = None, **kwargs):
        super().__init__(message, **kwargs)
        self.residual = residual


class ModeUnstableError(TrapKohnError):
    """|g_m| ≥ Ω_m: квадратичная форма моды не положительно определена"""

    def __init__(self, message: str, mode: int = None, **kwargs):
        super().__init__(message, **kwargs)
        self.mode = mode


class ConfigurationError(TrapKohnError):
    """Ошибка конфигурации"""


class OutputError(TrapKohnError):
    """Ошибка записи результатов"""

    def __init__(self, message: str, path: str = None, **kwargs):
        super().__init__(message, **kwargs)
        self.path = path
