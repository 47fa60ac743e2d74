"""
Команда constants: K, ε̃ и невязки тождеств модели
"""

import structlog

from trap_kohn.config import RunConfig
from trap_kohn.services.audit import log_operation
from trap_kohn.services.model import derive_constants
from trap_kohn.services.reporter import constants_report, write_text
from trap_kohn.utils.logging_context import log_command_call

log = structlog.get_logger(__name__)

# порог, при котором отчёт считается успешным
IDENTITY_TOLERANCE = 1e-10


@log_operation
def cmd_constants(config: RunConfig) -> int:
    """Печатает константы; код 0, если все невязки < IDENTITY_TOLERANCE, иначе 1"""
    log_command_call("cmd_constants", config)
    params = config.model.to_params()
    dc = derive_constants(params)
    write_text(constants_report(params, dc), config.output.path)

    worst = max(dc.identity_residuals.max(), dc.eps_form_residual)
    if worst >= IDENTITY_TOLERANCE:
        log.warning("identity_residuals_too_large", worst=worst, tolerance=IDENTITY_TOLERANCE)
        return 1
    return 0
