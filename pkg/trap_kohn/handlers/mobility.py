"""
Команда mobility: спектр μ(z, z₀; ω), сравнение формул и проверка теоремы Кона
"""

import sys

import structlog

from trap_kohn.config import RunConfig
from trap_kohn.services.audit import log_operation
from trap_kohn.services.model import derive_constants
from trap_kohn.services.reporter import format_float, render_spectrum, write_text
from trap_kohn.services.response import (
    Method,
    compare_spectrum,
    homogeneous_spectrum,
    scan_spectrum,
)
from trap_kohn.utils.exceptions import TrapKohnError
from trap_kohn.utils.logging_context import log_command_call, log_command_error

log = structlog.get_logger(__name__)


@log_operation
def cmd_mobility(config: RunConfig) -> int:
    """Считает спектр по сетке частот и пишет CSV/JSON в output.path или stdout.

    Координаты задаются в единицах L_F, частоты и η в единицах ω_ℓ;
    в выходном файле частоты физические.
    """
    task = config.task
    numerics = config.numerics
    params = config.model.to_params()
    dc = derive_constants(params)

    grid = [w * params.omega_l for w in task.frequency_grid()]
    z = task.z * params.l_fermi
    z0 = task.z0 * params.l_fermi
    eta = numerics.eta * params.omega_l
    log_command_call("cmd_mobility", config, points=len(grid), homogeneous=task.homogeneous, compare=task.compare)

    try:
        if task.homogeneous:
            spectrum = homogeneous_spectrum(z, grid, params, dc, eta, quad_order=numerics.quad_order)
        elif task.compare:
            spectrum = compare_spectrum(z, z0, grid, params, dc, eta, n_max=numerics.n_max)
        else:
            spectrum = scan_spectrum(z, z0, grid, params, dc, eta, method=Method(task.method), n_max=numerics.n_max)
    except TrapKohnError as e:
        # контекст запуска в логе, сообщение пользователю пишет middleware
        log_command_error("cmd_mobility", config, e)
        raise

    if task.homogeneous or task.compare:
        sys.stderr.write(f"max_rel_diff = {format_float(spectrum.meta['max_rel_diff'])}\n")

    flagged = sum(1 for s in spectrum.samples if s.near_pole)
    if flagged:
        log.warning("near_pole_rows", count=flagged)
    write_text(render_spectrum(spectrum, config.output.format), config.output.path)
    return 0
