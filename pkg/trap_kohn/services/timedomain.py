"""Оракул во временной области: явное интегрирование уравнения движения фазы.

φ̈ = ε̃²∂²_u φ − ω_ℓ²Ṽ_c²·sin(u)·(2/π)∫sin(u′)φ(u′)du′ − γφ̇ + F(t)·s(u),
s(u) = −(ε̃K/ħ)·δ_h(u − u₀(z₀)) + (2ω_ℓṼ_c/πħ)·sin(u₀(z₀))·sin(u).

Сетка равномерная на [−π, 0] с условием Дирихле, интеграл проектора: трапеции,
шаг по времени: leapfrog (скорости на полушагах, полунеявное затухание).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Sequence

import numpy as np
import structlog
from scipy.signal import find_peaks

from trap_kohn.services.geometry import u_of_z, z_of_u
from trap_kohn.services.model import DerivedConstants, ModelParams
from trap_kohn.services.response import nearest_pole
from trap_kohn.services.spectral import uniform_nodes
from trap_kohn.utils.exceptions import (
    CFLViolationError,
    DomainError,
    GridTooCoarseError,
    NumericalInstabilityError,
    OutsideFermiSeaError,
    TransientNotDecayedError,
)

log = structlog.get_logger(__name__)

__all__ = [
    "PhaseField",
    "ForceSpec",
    "Trajectory",
    "DriveFit",
    "CFL_LIMIT",
    "DEFAULT_CFL",
    "DEFAULT_INTERIOR_NODES",
    "cfl_time_step",
    "kohn_amplitude",
    "com_position",
    "kohn_mode_residual",
    "integrate_phase_field",
    "measure_frequency",
    "spectral_lines",
    "heisenberg_com_check",
    "fit_drive",
    "force_position",
    "timedomain_response",
    "timedomain_mobility",
]

CFL_LIMIT = 0.5
DEFAULT_CFL = 0.4
DEFAULT_INTERIOR_NODES = 511
MIN_RESIDUAL_NODES = 64
# проверка на NaN каждые столько шагов
_NAN_CHECK_EVERY = 1000

DeltaKind = Literal["nearest", "linear"]


@dataclass
class PhaseField:
    """Профиль фазы φ(u) и скорость φ̇(u) на равномерной сетке [−π, 0] в момент time"""

    nodes: np.ndarray
    phi: np.ndarray
    phi_dot: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.phi = np.array(self.phi, dtype=float)
        self.phi_dot = np.array(self.phi_dot, dtype=float)
        if self.nodes.size < 3:
            raise GridTooCoarseError("phase field needs at least 3 nodes", nodes=int(self.nodes.size), required=3)
        if self.phi.shape != self.nodes.shape or self.phi_dot.shape != self.nodes.shape:
            raise DomainError("phi, phi_dot and nodes must have the same shape", field="phi")
        steps = np.diff(self.nodes)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError("phase field requires a uniform grid", field="nodes")
        for arr in (self.phi, self.phi_dot):
            if abs(arr[0]) > 1e-12 or abs(arr[-1]) > 1e-12:
                raise DomainError("phase field violates Dirichlet boundary condition", field="phi")
            arr[0] = 0.0
            arr[-1] = 0.0

    @classmethod
    def from_function(
        cls,
        phi: Callable[[np.ndarray], np.ndarray],
        n_interior: int = DEFAULT_INTERIOR_NODES,
        phi_dot: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> "PhaseField":
        nodes = uniform_nodes(n_interior)
        values = np.array(phi(nodes), dtype=float)
        rates = np.zeros_like(values) if phi_dot is None else np.array(phi_dot(nodes), dtype=float)
        for arr in (values, rates):
            arr[0] = 0.0
            arr[-1] = 0.0
        return cls(nodes=nodes, phi=values, phi_dot=rates)

    @classmethod
    def at_rest(cls, n_interior: int = DEFAULT_INTERIOR_NODES) -> "PhaseField":
        nodes = uniform_nodes(n_interior)
        return cls(nodes=nodes, phi=np.zeros_like(nodes), phi_dot=np.zeros_like(nodes))

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def interior_count(self) -> int:
        return int(self.nodes.size - 2)


@dataclass(frozen=True)
class ForceSpec:
    """Точечная сила F(t) = F₀·ramp(t)·sin(ωt), приложенная в z₀"""

    z0: float
    amplitude: float
    omega: float
    ramp_time: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.ramp_time < 0.0:
            raise DomainError("ramp time must be >= 0", field="ramp_time", value=self.ramp_time)
        if self.gamma < 0.0:
            raise DomainError("damping must be >= 0", field="gamma", value=self.gamma)

    def value(self, t: float) -> float:
        ramp = 1.0
        if self.ramp_time > 0.0 and t < self.ramp_time:
            ramp = math.sin(0.5 * math.pi * t / self.ramp_time) ** 2
        return self.amplitude * ramp * math.sin(self.omega * t)


@dataclass
class Trajectory:
    """Записанные ряды интегрирования; снимки поля: каждые record_every шагов"""

    times: np.ndarray
    watch_points: np.ndarray
    watch_phi: np.ndarray
    watch_velocity: np.ndarray
    kohn: np.ndarray
    energy: Optional[np.ndarray]
    snapshots: List[PhaseField] = field(default_factory=list)
    final: Optional[PhaseField] = None
    dt: float = 0.0


@dataclass(frozen=True)
class DriveFit:
    """Результат подгонки j(t) ≈ A·cos(ωt) + B·sin(ωt)"""

    cos_coeff: float
    sin_coeff: float
    relative_residual: float

    @property
    def amplitude(self) -> float:
        return math.hypot(self.cos_coeff, self.sin_coeff)


def cfl_time_step(h: float, dc: DerivedConstants, factor: float = DEFAULT_CFL) -> float:
    """dt = factor·h/ε̃"""
    return factor * h / dc.eps_tilde


def _trapezoid_overlap(nodes: np.ndarray, values: np.ndarray, h: float) -> float:
    # концы нулевые, поэтому формула трапеций сводится к h·Σ
    return float(h * np.dot(np.sin(nodes[1:-1]), values[1:-1]))


def kohn_amplitude(phase: PhaseField) -> float:
    """(2/π)∫sin(u)φ(u)du: амплитуда моды Кона"""
    return (2.0 / math.pi) * _trapezoid_overlap(phase.nodes, phase.phi, phase.spacing)


def com_position(phase: PhaseField, params: ModelParams) -> float:
    """Смещение центра масс (2/(πk_F))∫sin(u)φ(u)du; требует заданных N и α"""
    k_fermi = params.k_fermi
    if k_fermi is None:
        raise DomainError("centre-of-mass position needs n_particles and alpha", field="k_fermi")
    return kohn_amplitude(phase) / k_fermi


def kohn_mode_residual(params: ModelParams, dc: DerivedConstants, n_interior: int) -> float:
    """‖ε̃²∂²φ_K − ω_ℓ²Ṽ_c²(2/π)sin(u)∫sin φ_K + ω_ℓ²φ_K‖_∞ / ‖ω_ℓ²φ_K‖_∞ для φ_K = sin u"""
    if n_interior < MIN_RESIDUAL_NODES:
        raise GridTooCoarseError(
            f"kohn residual needs >= {MIN_RESIDUAL_NODES} interior nodes",
            nodes=n_interior,
            required=MIN_RESIDUAL_NODES,
        )
    nodes = uniform_nodes(n_interior)
    h = nodes[1] - nodes[0]
    phi = np.sin(nodes)
    phi[0] = 0.0
    phi[-1] = 0.0
    wl2 = params.omega_l**2
    second = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / (h * h)
    projector = wl2 * params.vtilde_c**2 * (2.0 / math.pi) * _trapezoid_overlap(nodes, phi, h)
    residual = dc.eps_tilde**2 * second - projector * np.sin(nodes[1:-1]) + wl2 * phi[1:-1]
    value = float(np.max(np.abs(residual)) / (wl2 * np.max(np.abs(phi))))
    log.debug("kohn_mode_residual", nodes=n_interior, residual=value)
    return value


class _PointReader:
    """Линейная интерполяция по сетке в точке u"""

    def __init__(self, nodes: np.ndarray, u: float):
        h = nodes[1] - nodes[0]
        pos = (u - nodes[0]) / h
        j = int(min(max(math.floor(pos), 0), nodes.size - 2))
        self.j = j
        self.theta = pos - j

    def __call__(self, arr: np.ndarray) -> float:
        return (1.0 - self.theta) * arr[self.j] + self.theta * arr[self.j + 1]


def _nearest_node(nodes: np.ndarray, u: float) -> int:
    pos = (u - nodes[0]) / (nodes[1] - nodes[0])
    return int(min(max(round(pos), 1), nodes.size - 2))


def force_position(
    z0: float, params: ModelParams, n_interior: int = DEFAULT_INTERIOR_NODES, delta_kind: DeltaKind = "linear"
) -> float:
    """Точка, в которой на сетке фактически приложена сила.

    Для linear это сам z₀; nearest сдвигает силу в ближайший внутренний узел.
    """
    if delta_kind == "linear":
        return z0
    if delta_kind != "nearest":
        raise DomainError(f"unknown delta kind {delta_kind!r}", field="delta_kind")
    nodes = uniform_nodes(n_interior)
    return float(z_of_u(nodes[_nearest_node(nodes, u_of_z(z0, params.l_fermi))], params.l_fermi))


def _source_profile(
    nodes: np.ndarray,
    u_force: float,
    params: ModelParams,
    dc: DerivedConstants,
    delta_kind: DeltaKind,
) -> np.ndarray:
    """s(u) на сетке: дискретная δ плюс компенсирующий вклад моды Кона"""
    h = nodes[1] - nodes[0]
    delta = np.zeros_like(nodes)
    pos = (u_force - nodes[0]) / h
    last = nodes.size - 2
    if delta_kind == "nearest":
        j = _nearest_node(nodes, u_force)
        delta[j] = 1.0 / h
        u_force = float(nodes[j])
    elif delta_kind == "linear":
        j = int(min(max(math.floor(pos), 0), last))
        theta = pos - j
        if j >= 1:
            delta[j] += (1.0 - theta) / h
        if j + 1 <= last:
            delta[j + 1] += theta / h
    else:
        raise DomainError(f"unknown delta kind {delta_kind!r}", field="delta_kind")
    source = -(dc.eps_tilde * dc.k_lutt / params.hbar) * delta
    source += (2.0 * params.omega_l * params.vtilde_c / (math.pi * params.hbar)) * math.sin(u_force) * np.sin(nodes)
    source[0] = 0.0
    source[-1] = 0.0
    return source


def integrate_phase_field(
    initial: PhaseField,
    force: Optional[ForceSpec],
    params: ModelParams,
    dc: DerivedConstants,
    dt: float,
    t_end: float,
    *,
    watch_points: Sequence[float] = (),
    record_from: float = 0.0,
    record_every: int = 0,
    record_energy: bool = False,
    delta_kind: DeltaKind = "linear",
    gamma: Optional[float] = None,
) -> Trajectory:
    """Интегрирует уравнение движения фазы от initial.time до t_end.

    watch_points: точки u, где на каждом шаге после record_from пишутся φ и φ̇;
    record_every > 0 добавляет полные снимки поля. Затухание берётся из force.gamma,
    если не задано явно.
    """
    nodes = initial.nodes
    h = initial.spacing
    limit = CFL_LIMIT * h / dc.eps_tilde
    if dt <= 0.0 or dt > limit * (1.0 + 1e-12):
        raise CFLViolationError(f"CFL violated: dt = {dt!r} > 0.5*h/eps_tilde = {limit!r}", dt=dt, limit=limit)
    if t_end < initial.time:
        raise DomainError("t_end must not precede the initial time", field="t_end", value=t_end)
    if gamma is None:
        gamma = force.gamma if force is not None else 0.0
    if gamma < 0.0:
        raise DomainError("damping must be >= 0", field="gamma", value=gamma)

    source = None
    if force is not None:
        if abs(force.z0) >= params.l_fermi:
            raise OutsideFermiSeaError(
                f"outside classical Fermi sea: force at |z0| = {abs(force.z0)!r} >= L_F", field="z0", value=force.z0
            )
        source = _source_profile(nodes, u_of_z(force.z0, params.l_fermi), params, dc, delta_kind)

    eps2 = dc.eps_tilde**2
    proj = params.omega_l**2 * params.vtilde_c**2 * (2.0 / math.pi)
    sin_u = np.sin(nodes)
    sin_inner = sin_u[1:-1]
    inv_h2 = 1.0 / (h * h)

    def accel(phi: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros_like(phi)
        inner = eps2 * (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) * inv_h2
        if proj != 0.0:
            inner -= proj * (h * np.dot(sin_inner, phi[1:-1])) * sin_inner
        out[1:-1] = inner
        if source is not None:
            out += force.value(t) * source
        return out

    def energy(phi: np.ndarray, vel: np.ndarray) -> float:
        kinetic = 0.5 * h * np.dot(vel, vel)
        grad = np.diff(phi) / h
        potential = 0.5 * eps2 * h * np.dot(grad, grad)
        overlap = h * np.dot(sin_inner, phi[1:-1])
        return float(kinetic + potential + 0.5 * proj * overlap * overlap)

    readers = [_PointReader(nodes, u) for u in watch_points]
    n_steps = int(math.ceil((t_end - initial.time) / dt - 1e-9))
    t0 = initial.time

    times: List[float] = []
    p_phi: List[List[float]] = []
    p_vel: List[List[float]] = []
    kohn: List[float] = []
    energies: List[float] = []
    snapshots: List[PhaseField] = []

    phi = initial.phi.copy()
    vel_int = initial.phi_dot.copy()

    def record(step: int, t: float, phi_now: np.ndarray, vel_now: np.ndarray) -> None:
        if t + 1e-12 < record_from:
            return
        times.append(t)
        p_phi.append([p(phi_now) for p in readers])
        p_vel.append([p(vel_now) for p in readers])
        kohn.append((2.0 / math.pi) * h * float(np.dot(sin_inner, phi_now[1:-1])))
        if record_energy:
            energies.append(energy(phi_now, vel_now))
        if record_every and step % record_every == 0:
            snapshots.append(PhaseField(nodes=nodes, phi=phi_now.copy(), phi_dot=vel_now.copy(), time=t))

    record(0, t0, phi, vel_int)
    damp_minus = 1.0 - 0.5 * gamma * dt
    damp_plus = 1.0 + 0.5 * gamma * dt
    vel_half = vel_int + 0.5 * dt * (accel(phi, t0) - gamma * vel_int)

    for step in range(1, n_steps + 1):
        t = t0 + step * dt
        phi = phi + dt * vel_half
        a = accel(phi, t)
        vel_next = (damp_minus * vel_half + dt * a) / damp_plus
        vel_int = 0.5 * (vel_half + vel_next)
        vel_half = vel_next
        if step % _NAN_CHECK_EVERY == 0 and not np.all(np.isfinite(phi)):
            log.error("phase_integration_nan", step=step, time=t)
            raise NumericalInstabilityError(f"NaN in phase field at step {step}, t = {t!r}", step=step, time=t)
        record(step, t, phi, vel_int)

    if not np.all(np.isfinite(phi)):
        raise NumericalInstabilityError("NaN in final phase field", step=n_steps, time=t0 + n_steps * dt)

    final = PhaseField(nodes=nodes, phi=phi, phi_dot=vel_int, time=t0 + n_steps * dt)
    log.debug("phase_integration_done", steps=n_steps, dt=dt, nodes=initial.interior_count, gamma=gamma)
    return Trajectory(
        times=np.array(times),
        watch_points=np.array(list(watch_points), dtype=float),
        watch_phi=np.array(p_phi).reshape(len(times), len(readers)),
        watch_velocity=np.array(p_vel).reshape(len(times), len(readers)),
        kohn=np.array(kohn),
        energy=np.array(energies) if record_energy else None,
        snapshots=snapshots,
        final=final,
        dt=dt,
    )


def measure_frequency(times: np.ndarray, signal: np.ndarray) -> float:
    """Угловая частота по пересечениям нуля с линейной интерполяцией"""
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    idx = np.flatnonzero(np.signbit(signal[:-1]) != np.signbit(signal[1:]))
    if idx.size < 3:
        raise DomainError("not enough zero crossings to measure a frequency", field="signal")
    s0 = signal[idx]
    s1 = signal[idx + 1]
    crossings = times[idx] - s0 * (times[idx + 1] - times[idx]) / (s1 - s0)
    return float(math.pi * (crossings.size - 1) / (crossings[-1] - crossings[0]))


def spectral_lines(
    times: np.ndarray, signal: np.ndarray, min_relative_height: float = 0.02
) -> tuple[np.ndarray, np.ndarray]:
    """Угловые частоты и амплитуды линий спектра сигнала (окно Ханна + поиск пиков)"""
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if times.size < 16:
        raise DomainError("signal too short for a spectrum", field="signal")
    dt = float(times[1] - times[0])
    window = np.hanning(signal.size)
    spectrum = np.abs(np.fft.rfft((signal - signal.mean()) * window))
    omegas = 2.0 * math.pi * np.fft.rfftfreq(signal.size, dt)
    peaks, _ = find_peaks(spectrum, height=min_relative_height * spectrum.max())
    return omegas[peaks], spectrum[peaks]


def heisenberg_com_check(trajectory: Trajectory, params: ModelParams) -> float:
    """max|ẍ + ω_ℓ²x| / max|ω_ℓ²x| для амплитуды моды Кона свободной траектории"""
    x = trajectory.kohn
    if x.size < 3:
        raise DomainError("trajectory too short for the Heisenberg check", field="kohn")
    dt = float(trajectory.times[1] - trajectory.times[0])
    accel = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / (dt * dt)
    wl2 = params.omega_l**2
    return float(np.max(np.abs(accel + wl2 * x[1:-1])) / (wl2 * np.max(np.abs(x))))


def fit_drive(times: np.ndarray, signal: np.ndarray, omega: float) -> DriveFit:
    """МНК-подгонка signal ≈ A·cos(ωt) + B·sin(ωt)"""
    design = np.column_stack([np.cos(omega * times), np.sin(omega * times)])
    coeffs, *_ = np.linalg.lstsq(design, signal, rcond=None)
    a, b = coeffs
    resid = signal - design @ coeffs
    amplitude = math.hypot(a, b)
    rms = float(np.sqrt(np.mean(resid * resid)))
    relative = rms / amplitude if amplitude > 0.0 else float("inf")
    return DriveFit(cos_coeff=float(a), sin_coeff=float(b), relative_residual=relative)


def timedomain_response(
    z: float,
    z0: float,
    omega: float,
    gamma: float,
    params: ModelParams,
    dc: DerivedConstants,
    grid: int = DEFAULT_INTERIOR_NODES,
    dt: Optional[float] = None,
    *,
    amplitude: float = 1.0,
    delta_kind: DeltaKind = "linear",
    ramp_factor: float = 5.0,
    end_factor: float = 20.0,
    fit_periods: float = 5.0,
    max_residual: float = 0.01,
    record_every: int = 0,
) -> tuple[complex, Trajectory]:
    """Подвижность из вынужденного затухающего движения: μ = J/(iF₀), J = A + iB.

    Сила F₀·sin(ωt) нарастает за ramp_factor/γ, интегрирование до end_factor/γ,
    ток j(z, t) = −(1/π)∂_tφ(u₀(z), t) подгоняется на последних fit_periods периодах.
    Возвращает подвижность и траекторию окна подгонки (снимки поля при record_every > 0).
    """
    if gamma <= 0.0:
        raise DomainError("time-domain mobility needs gamma > 0", field="gamma", value=gamma)
    if omega <= 0.0:
        raise DomainError("drive frequency must be positive", field="omega", value=omega)
    pole = nearest_pole(omega, params, dc)
    if abs(omega - pole) < 3.0 * gamma:
        log.warning("timedomain_drive_near_pole", omega=omega, pole=pole, gamma=gamma)

    initial = PhaseField.at_rest(grid)
    if dt is None:
        dt = cfl_time_step(initial.spacing, dc)
    force = ForceSpec(z0=z0, amplitude=amplitude, omega=omega, ramp_time=ramp_factor / gamma, gamma=gamma)
    t_end = end_factor / gamma
    window = fit_periods * 2.0 * math.pi / omega
    if window >= t_end - force.ramp_time:
        raise DomainError("fit window overlaps the ramp; increase end_factor", field="end_factor")
    u_obs = u_of_z(z, params.l_fermi)

    trajectory = integrate_phase_field(
        initial,
        force,
        params,
        dc,
        dt,
        t_end,
        watch_points=[u_obs],
        record_from=t_end - window,
        record_every=record_every,
        delta_kind=delta_kind,
    )
    current = -trajectory.watch_velocity[:, 0] / math.pi
    fit = fit_drive(trajectory.times, current, omega)
    if fit.relative_residual > max_residual:
        log.error("timedomain_transient_not_decayed", residual=fit.relative_residual, omega=omega, gamma=gamma)
        raise TransientNotDecayedError(
            f"transient not decayed (fit residual {fit.relative_residual:.3g} > {max_residual}); run longer",
            residual=fit.relative_residual,
        )
    mobility = complex(fit.sin_coeff, -fit.cos_coeff) / amplitude
    log.info(
        "timedomain_mobility",
        z=z,
        z0=z0,
        omega=omega,
        gamma=gamma,
        value_re=mobility.real,
        value_im=mobility.imag,
        residual=fit.relative_residual,
    )
    return mobility, trajectory


def timedomain_mobility(
    z: float,
    z0: float,
    omega: float,
    gamma: float,
    params: ModelParams,
    dc: DerivedConstants,
    grid: int = DEFAULT_INTERIOR_NODES,
    dt: Optional[float] = None,
    **kwargs,
) -> complex:
    """Только подвижность из timedomain_response"""
    mobility, _ = timedomain_response(z, z0, omega, gamma, params, dc, grid, dt, **kwargs)
    return mobility

