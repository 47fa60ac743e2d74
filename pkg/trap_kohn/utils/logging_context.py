"""
Утилиты для контекстного логирования команд CLI
"""

from typing import Any, Dict

import structlog

from trap_kohn.config import RunConfig


def get_run_context(config: RunConfig) -> Dict[str, Any]:
    """Ключевые параметры запуска для логов"""
    task = config.task
    return {
        "vtilde_c": config.model.vtilde_c,
        "omega_l": config.model.omega_l,
        "l_fermi": config.model.l_fermi,
        "z": task.z,
        "z0": task.z0,
        "output_format": config.output.format,
        "output_path": config.output.path,
    }


def log_command_call(command_name: str, config: RunConfig, **kwargs) -> None:
    """
    Логирует вызов команды с контекстом

    Args:
        command_name: Название команды
        config: Конфигурация запуска
        **kwargs: Дополнительные параметры для логирования
    """
    log = structlog.get_logger()
    context = get_run_context(config)
    context.update(kwargs)

    log.info(f"{command_name}_called", **context)


def log_command_error(command_name: str, config: RunConfig, error: Exception, **kwargs) -> None:
    """
    Логирует ошибку команды с контекстом

    Args:
        command_name: Название команды
        config: Конфигурация запуска
        error: Исключение
        **kwargs: Дополнительные параметры для логирования
    """
    log = structlog.get_logger()
    context = get_run_context(config)
    context.update({"error": str(error), "error_type": type(error).__name__, **kwargs})

    log.error(f"{command_name}_error", **context)
