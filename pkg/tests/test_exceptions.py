"""Тесты для кастомных исключений."""

import pytest

from trap_kohn.utils.exceptions import (
    CFLViolationError,
    ClosedFormSingularError,
    ConfigurationError,
    DomainError,
    GridTooCoarseError,
    ModelUnstableError,
    ModeUnstableError,
    NumericalInstabilityError,
    OutputError,
    OutsideFermiSeaError,
    PoleOnRealAxisError,
    TransientNotDecayedError,
    TrapKohnError,
)


class TestBaseError:
    """Тесты базового исключения."""

    def test_details(self):
        """Дополнительные аргументы попадают в details."""
        error = ConfigurationError("bad config", path="run.json", line=3)
        assert str(error) == "bad config"
        assert error.details == {"path": "run.json", "line": 3}

    @pytest.mark.parametrize(
        "cls",
        [
            ModelUnstableError,
            DomainError,
            PoleOnRealAxisError,
            GridTooCoarseError,
            CFLViolationError,
            NumericalInstabilityError,
            TransientNotDecayedError,
            ModeUnstableError,
            ConfigurationError,
            OutputError,
        ],
    )
    def test_hierarchy(self, cls):
        """Все ошибки наследуют TrapKohnError."""
        assert issubclass(cls, TrapKohnError)


class TestAttributes:
    """Тесты атрибутов исключений."""

    def test_domain_error(self):
        """DomainError хранит поле и значение."""
        error = OutsideFermiSeaError("outside classical Fermi sea", field="z", value=1.5)
        assert isinstance(error, DomainError)
        assert error.field == "z"
        assert error.value == 1.5

    def test_pole(self):
        """Сингулярность замкнутой формы: частный случай полюса."""
        error = ClosedFormSingularError("closed form singular", omega=1.6, pole=1.6)
        assert isinstance(error, PoleOnRealAxisError)
        assert error.pole == 1.6

    def test_cfl(self):
        """CFLViolationError хранит шаг и предел."""
        error = CFLViolationError("CFL violated", dt=0.1, limit=0.05)
        assert (error.dt, error.limit) == (0.1, 0.05)

    def test_output(self):
        """OutputError хранит путь."""
        assert OutputError("cannot write", path="/x").path == "/x"

    def test_grid(self):
        """GridTooCoarseError хранит число узлов."""
        error = GridTooCoarseError("coarse", nodes=4, required=8)
        assert error.nodes == 4 and error.required == 8
