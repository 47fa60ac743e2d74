from trap_kohn.handlers.constants import cmd_constants
from trap_kohn.handlers.mobility import cmd_mobility
from trap_kohn.handlers.oracle import cmd_oracle, cmd_oracle_bogoliubov, cmd_oracle_kohn_residual, cmd_oracle_timedomain

__all__ = [
    "cmd_constants",
    "cmd_mobility",
    "cmd_oracle",
    "cmd_oracle_bogoliubov",
    "cmd_oracle_kohn_residual",
    "cmd_oracle_timedomain",
]
