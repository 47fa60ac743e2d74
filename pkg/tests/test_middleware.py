"""Тесты для ErrorHandlerMiddleware."""

import io

import pytest
from pydantic import ValidationError

from trap_kohn.config import TaskSection
from trap_kohn.middleware.error_handler import (
    EXIT_DOMAIN,
    EXIT_FAILURE,
    EXIT_IO,
    EXIT_OK,
    ErrorHandlerMiddleware,
)
from trap_kohn.utils.exceptions import (
    CFLViolationError,
    ConfigurationError,
    ModelUnstableError,
    OutputError,
    PoleOnRealAxisError,
)


def _raiser(error):
    def handler():
        raise error

    return handler


@pytest.fixture
def stream():
    return io.StringIO()


@pytest.fixture
def middleware(stream):
    return ErrorHandlerMiddleware(stream=stream)


class TestErrorHandlerMiddleware:
    """Отображение исключений в коды выхода."""

    def test_success(self, middleware, stream):
        """Код обработчика возвращается как есть."""
        assert middleware(lambda x: x, EXIT_OK) == EXIT_OK
        assert stream.getvalue() == ""

    def test_handler_arguments(self, middleware):
        """Аргументы передаются обработчику."""
        assert middleware(lambda a, b=0: a + b, 1, b=2) == 3

    @pytest.mark.parametrize(
        "error,code",
        [
            (OutputError("cannot write", path="/x"), EXIT_IO),
            (PermissionError("denied"), EXIT_IO),
            (CFLViolationError("CFL violated", dt=1.0, limit=0.5), EXIT_DOMAIN),
            (ConfigurationError("bad config"), EXIT_DOMAIN),
            (ModelUnstableError("model unstable: |vtilde_c| >= 1", vtilde_c=1.2), EXIT_DOMAIN),
            (PoleOnRealAxisError("pole", omega=1.0, pole=1.0), EXIT_DOMAIN),
            (RuntimeError("boom"), EXIT_FAILURE),
        ],
    )
    def test_exit_codes(self, middleware, error, code):
        """Каждый класс ошибок даёт свой код."""
        assert middleware(_raiser(error)) == code

    def test_domain_message(self, middleware, stream):
        """Сообщение доменной ошибки уходит в поток."""
        middleware(_raiser(ModelUnstableError("model unstable: |vtilde_c| >= 1")))
        assert stream.getvalue() == "error: model unstable: |vtilde_c| >= 1\n"

    def test_validation_error(self, middleware, stream):
        """Ошибки pydantic дают код 2 и первую причину."""

        def handler():
            TaskSection(omegas=[0.5, 0.4])

        assert middleware(handler) == EXIT_DOMAIN
        assert stream.getvalue().startswith("invalid parameters:")
        assert "strictly increasing" in stream.getvalue()

    def test_generic_message(self, middleware, stream):
        """Неожиданная ошибка называет свой тип."""
        middleware(_raiser(KeyError("x")))
        assert stream.getvalue().startswith("internal error (KeyError)")

    def test_validation_error_type(self):
        """ValidationError действительно выбрасывается секцией."""
        with pytest.raises(ValidationError):
            TaskSection(omegas=[0.5, 0.4])
