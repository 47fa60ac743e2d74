"""
Middleware для глобальной обработки ошибок команд CLI
"""

import sys
from typing import Callable, Optional, TextIO

import structlog
from pydantic import ValidationError

from trap_kohn.utils.exceptions import (
    CFLViolationError,
    ConfigurationError,
    NumericalInstabilityError,
    OutputError,
    TrapKohnError,
)

log = structlog.get_logger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DOMAIN = 2
EXIT_IO = 3


class ErrorHandlerMiddleware:
    """Middleware для обработки ошибок в обработчиках команд"""

    def __init__(self, stream: Optional[TextIO] = None):
        self._stream = stream

    def __call__(self, handler: Callable[..., int], *args, **kwargs) -> int:
        try:
            return handler(*args, **kwargs)
        except OutputError as e:
            return self._handle_output_error(e)
        except OSError as e:
            return self._handle_output_error(e)
        except (CFLViolationError, NumericalInstabilityError) as e:
            return self._handle_integration_error(e)
        except ConfigurationError as e:
            return self._handle_configuration_error(e)
        except ValidationError as e:
            return self._handle_validation_error(e)
        except TrapKohnError as e:
            return self._handle_domain_error(e)
        except Exception as e:
            return self._handle_generic_error(e)

    def _handle_output_error(self, error):
        """Ошибки ввода-вывода"""
        log.error("output_error", error=str(error), error_type=type(error).__name__)
        self._send_error_message(f"error: {error}")
        return EXIT_IO

    def _handle_integration_error(self, error):
        """Нарушение CFL или неустойчивость интегрирования"""
        log.error("integration_error", error=str(error), details=getattr(error, "details", {}))
        self._send_error_message(f"error: {error}")
        return EXIT_DOMAIN

    def _handle_configuration_error(self, error):
        """Ошибки конфигурации"""
        log.warning("configuration_error", error=str(error), details=error.details)
        self._send_error_message(f"config error: {error}")
        return EXIT_DOMAIN

    def _handle_validation_error(self, error):
        """Ошибки валидации pydantic (конфиг или флаги)"""
        log.warning("validation_error", errors=error.error_count())
        # первая причина обычно содержит исходное сообщение домена
        first = error.errors()[0] if error.errors() else {}
        self._send_error_message(f"invalid parameters: {first.get('msg', str(error))}")
        return EXIT_DOMAIN

    def _handle_domain_error(self, error):
        """Ошибки предметной области: параметры вне допустимых интервалов, полюса"""
        log.warning("domain_error", error=str(error), error_type=type(error).__name__, details=error.details)
        self._send_error_message(f"error: {error}")
        return EXIT_DOMAIN

    def _handle_generic_error(self, error):
        """Обработка общих ошибок"""
        log.error("unexpected_error", error=str(error), error_type=type(error).__name__, exc_info=True)
        self._send_error_message(f"internal error ({type(error).__name__}): {error}")
        return EXIT_FAILURE

    def _send_error_message(self, message: str) -> None:
        stream = self._stream or sys.stderr
        try:
            stream.write(message + "\n")
        except Exception:
            pass  # Не можем вывести сообщение об ошибке
