"""
Точка входа CLI: разбор флагов, сборка RunConfig и вызов обработчиков
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog

from trap_kohn.config import RunConfig, get_settings
from trap_kohn.handlers import cmd_constants, cmd_mobility, cmd_oracle
from trap_kohn.logging_setup import setup_logging
from trap_kohn.middleware.error_handler import ErrorHandlerMiddleware

log = structlog.get_logger(__name__)


def parse_modes(text: str) -> List[int]:
    """'1..4' → [1, 2, 3, 4]; '1,3' → [1, 3]"""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            modes = list(range(int(lo), int(hi) + 1))
        else:
            modes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid mode list {text!r}") from e
    if not modes:
        raise argparse.ArgumentTypeError(f"empty mode list {text!r}")
    return modes


def parse_floats(text: str) -> List[float]:
    """'0.5,0.6,0.7' → [0.5, 0.6, 0.7]"""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid float list {text!r}") from e


def _model_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model (units: omega_l, L_F, hbar)")
    g.add_argument("--vc", dest="vtilde_c", type=float, help="renormalized coupling Ṽ_c, |Ṽ_c| < 1 (default 0)")
    g.add_argument("--omega-l", dest="omega_l", type=float, help="trap frequency ω_ℓ (default 1)")
    g.add_argument("--l-fermi", dest="l_fermi", type=float, help="Thomas-Fermi half-width L_F (default 1)")
    g.add_argument("--hbar", type=float, help="ħ (default 1)")
    g.add_argument("--n-particles", dest="n_particles", type=int, help="number of fermions N (with --alpha)")
    g.add_argument("--alpha", type=float, help="inverse oscillator length α; L_F = √(2N)/α")
    return p


def _output_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output", dest="path", help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trap-kohn",
        description="Inhomogeneous mobility of trapped 1D fermions: spectra, closed form vs mode sum, oracles.",
    )
    parser.add_argument("--config", type=Path, help="JSON config with keys model, numerics, task, output, units")
    parser.add_argument("--log-level", dest="log_level", help="overrides LOG_LEVEL")

    model = _model_parent()
    output = _output_parent()
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[model, output], help="print K, eps_tilde and identity residuals")

    mob = sub.add_parser("mobility", parents=[model, output], help="mobility spectrum μ(z, z0; ω)")
    mob.add_argument("--z", type=float, help="observation point, units of L_F (default 0)")
    mob.add_argument("--z0", type=float, help="force point, units of L_F (default 0)")
    mob.add_argument("--omega", type=float, help="single frequency, units of ω_ℓ (default 0.5)")
    mob.add_argument("--omega-min", dest="omega_min", type=float)
    mob.add_argument("--omega-max", dest="omega_max", type=float)
    mob.add_argument("--omega-step", dest="omega_step", type=float)
    mob.add_argument("--omegas", type=parse_floats, help="explicit increasing grid, comma separated")
    mob.add_argument("--method", choices=["mode_sum", "closed_form"], help="default mode_sum")
    mob.add_argument("--homogeneous", action="store_true", default=None, help="homogeneous mobility vs analytic")
    mob.add_argument("--compare", action="store_true", default=None, help="closed form vs mode sum, rel_diff column")
    mob.add_argument("--n-max", dest="n_max", type=int, help="mode cutoff (default 10000)")
    mob.add_argument("--quad-order", dest="quad_order", type=int, help="Gauss-Legendre order (default 64)")
    mob.add_argument("--eta", type=float, help="regularizing shift, units of ω_ℓ (default 1e-6)")

    oracle = sub.add_parser("oracle", help="independent numerical checks")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)

    bog = osub.add_parser("bogoliubov", parents=[model, output], help="mode frequencies per subtraction scheme")
    bog.add_argument("--m", dest="modes", type=parse_modes, help="modes, e.g. 1..4 or 1,3 (default 1..4)")
    bog.add_argument("--scheme", choices=["none", "project_out", "renormalize_trap"], help="default: all")

    kohn = osub.add_parser("kohn-residual", parents=[model, output], help="Kohn-mode discretization residual")
    kohn.add_argument("--nodes", dest="grid_nodes", type=int, help="interior grid nodes (default 511)")

    td = osub.add_parser("timedomain", parents=[model, output], help="driven damped simulation vs analytic")
    td.add_argument("--z", type=float, help="observation point, units of L_F")
    td.add_argument("--z0", type=float, help="force point, units of L_F")
    td.add_argument("--omega", type=float, help="drive frequency, units of ω_ℓ")
    td.add_argument("--gamma", type=float, help="damping, units of ω_ℓ (default 0.05)")
    td.add_argument("--nodes", dest="grid_nodes", type=int, help="interior grid nodes (default 511)")
    td.add_argument("--dt", type=float, help="time step (default 0.4·h/eps_tilde)")
    td.add_argument("--amplitude", type=float, help="force amplitude F0 (default 1)")
    td.add_argument(
        "--delta-kind", dest="delta_kind", choices=["nearest", "linear"], help="point-force discretization (default linear)"
    )
    td.add_argument("--n-max", dest="n_max", type=int, help="mode cutoff of the analytic reference")
    td.add_argument("--trajectory", help="write phi at the observation and force nodes over the fit window (CSV)")
    td.add_argument("--record-every", dest="record_every", type=int, help="snapshot stride in steps (default 10)")
    return parser


SECTIONS: Dict[str, tuple] = {
    "model": ("vtilde_c", "omega_l", "l_fermi", "hbar", "n_particles", "alpha"),
    "numerics": ("n_max", "quad_order", "eta", "gamma", "grid_nodes", "dt", "delta_kind", "amplitude", "record_every"),
    "task": (
        "z",
        "z0",
        "omega",
        "omega_min",
        "omega_max",
        "omega_step",
        "omegas",
        "method",
        "homogeneous",
        "compare",
        "modes",
        "scheme",
    ),
    "output": ("path", "format", "trajectory"),
}


def collect_overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """Флаги CLI, разложенные по секциям RunConfig"""
    values = vars(args)
    return {section: {key: values.get(key) for key in keys} for section, keys in SECTIONS.items()}


def load_config(args: argparse.Namespace) -> RunConfig:
    """Умолчания < JSON-файл < флаги CLI"""
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    return base.merged(collect_overrides(args))


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    if args.command == "constants":
        return cmd_constants(config)
    if args.command == "mobility":
        return cmd_mobility(config)
    return cmd_oracle(config, args.oracle_command)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, settings.log_format, settings.log_file)
    log.debug("cli_started", command=args.command)
    return ErrorHandlerMiddleware()(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
