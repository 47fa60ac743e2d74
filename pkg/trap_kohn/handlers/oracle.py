"""
Команда oracle: независимые численные проверки (Боголюбов, мода Кона, временная область)
"""

import cmath
import math
from typing import List

import structlog

from trap_kohn.config import RunConfig
from trap_kohn.services.audit import log_operation
from trap_kohn.services.bogoliubov import Scheme, bogoliubov_table
from trap_kohn.services.geometry import u_of_z
from trap_kohn.services.model import derive_constants
from trap_kohn.services.reporter import format_float, write_text, write_trajectory_csv
from trap_kohn.services.response import mobility_damped
from trap_kohn.services.timedomain import Trajectory, force_position, kohn_mode_residual, timedomain_response
from trap_kohn.utils.exceptions import ConfigurationError, DomainError, TrapKohnError
from trap_kohn.utils.logging_context import log_command_call, log_command_error

log = structlog.get_logger(__name__)

# допуски сравнения с затухающей аналитической подвижностью
AMPLITUDE_TOLERANCE = 0.01
PHASE_TOLERANCE_DEG = 2.0


def _schemes(config: RunConfig) -> List[Scheme]:
    if config.task.scheme is None:
        return list(Scheme)
    return [Scheme(config.task.scheme)]


def _phase_diff_deg(a: complex, b: complex) -> float:
    return math.degrees(abs(math.remainder(cmath.phase(a) - cmath.phase(b), 2.0 * math.pi)))


def _nearest_node(trajectory: Trajectory, u: float) -> int:
    field = trajectory.final
    j = int(round((u - field.nodes[0]) / field.spacing))
    return min(max(j, 1), field.nodes.size - 2)


@log_operation
def cmd_oracle_bogoliubov(config: RunConfig) -> int:
    """Таблица частот мод (в единицах ω_ℓ) для каждой схемы"""
    log_command_call("cmd_oracle_bogoliubov", config, modes=config.task.modes)
    params = config.model.to_params()
    results = bogoliubov_table(config.task.modes, params, _schemes(config))
    lines = ["scheme,m,frequency,squeeze_param"]
    for r in results:
        lines.append(
            f"{r.scheme.value},{r.mode_index},{format_float(r.frequency / params.omega_l)},"
            f"{format_float(r.squeeze_param)}"
        )
    write_text("\n".join(lines) + "\n", config.output.path)
    return 0


@log_operation
def cmd_oracle_kohn_residual(config: RunConfig) -> int:
    """Невязка моды Кона на сетке и отношение невязок при шаге h и h/2"""
    nodes = config.numerics.grid_nodes
    log_command_call("cmd_oracle_kohn_residual", config, nodes=nodes)
    params = config.model.to_params()
    dc = derive_constants(params)
    coarse = kohn_mode_residual(params, dc, nodes)
    fine = kohn_mode_residual(params, dc, 2 * (nodes + 1) - 1)
    text = (
        f"nodes = {nodes}\n"
        f"kohn_residual = {format_float(coarse)}\n"
        f"refined_residual = {format_float(fine)}\n"
        f"convergence_ratio = {format_float(coarse / fine)}\n"
    )
    write_text(text, config.output.path)
    return 0


@log_operation
def cmd_oracle_timedomain(config: RunConfig) -> int:
    """Сравнение вынужденного затухающего движения с аналитикой; код 0 при PASS, 1 при FAIL"""
    task = config.task
    numerics = config.numerics
    params = config.model.to_params()
    dc = derive_constants(params)
    z = task.z * params.l_fermi
    z0 = task.z0 * params.l_fermi
    omega = task.omega * params.omega_l
    gamma = numerics.gamma * params.omega_l
    log_command_call("cmd_oracle_timedomain", config, omega=omega, gamma=gamma, nodes=numerics.grid_nodes)
    for name, point in (("z", z), ("z0", z0)):
        u_of_z(point, params.l_fermi)  # |z| > L_F: OutsideFermiSeaError
        if abs(point) >= params.l_fermi:
            # на краю облака μ ≡ 0, относительная ошибка не определена
            raise DomainError(
                f"{name} on the cloud edge: |{name}| = {abs(point)!r} >= L_F, mobility vanishes identically",
                field=name,
                value=point,
            )

    try:
        simulated, trajectory = timedomain_response(
            z,
            z0,
            omega,
            gamma,
            params,
            dc,
            numerics.grid_nodes,
            numerics.dt,
            amplitude=numerics.amplitude,
            delta_kind=numerics.delta_kind,
            record_every=numerics.record_every if config.output.trajectory else 0,
        )
    except TrapKohnError as e:
        log_command_error("cmd_oracle_timedomain", config, e)
        raise
    # nearest прикладывает силу в узле сетки, аналитика считается там же
    z_force = force_position(z0, params, numerics.grid_nodes, numerics.delta_kind)
    analytic = mobility_damped(z, z_force, omega, gamma, params, dc, numerics.n_max)
    amp_err = abs(abs(simulated) - abs(analytic)) / abs(analytic)
    phase_err = _phase_diff_deg(simulated, analytic)
    passed = amp_err < AMPLITUDE_TOLERANCE and phase_err < PHASE_TOLERANCE_DEG
    text = (
        f"analytic = {format_float(analytic.real)} {format_float(analytic.imag)}i\n"
        f"simulated = {format_float(simulated.real)} {format_float(simulated.imag)}i\n"
        f"amplitude_rel_err = {format_float(amp_err)}\n"
        f"phase_err_deg = {format_float(phase_err)}\n"
        f"result = {'PASS' if passed else 'FAIL'}\n"
    )
    if config.output.trajectory:
        nodes = [_nearest_node(trajectory, u_of_z(point, params.l_fermi)) for point in (z, z0)]
        write_trajectory_csv(config.output.trajectory, trajectory, sorted(set(nodes)))
    write_text(text, config.output.path)
    log.info("timedomain_check", passed=passed, amplitude_rel_err=amp_err, phase_err_deg=phase_err)
    return 0 if passed else 1


ORACLE_COMMANDS = {
    "bogoliubov": cmd_oracle_bogoliubov,
    "kohn-residual": cmd_oracle_kohn_residual,
    "timedomain": cmd_oracle_timedomain,
}


def cmd_oracle(config: RunConfig, subcommand: str) -> int:
    """Диспетчер подкоманд oracle"""
    try:
        handler = ORACLE_COMMANDS[subcommand]
    except KeyError:
        raise ConfigurationError(f"unknown oracle subcommand {subcommand!r}", subcommand=subcommand) from None
    return handler(config)
