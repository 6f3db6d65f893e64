"""The ``quatsurf`` command line."""

from .commands import COMMANDS, cmd_darboux, cmd_invariants, cmd_surface, cmd_sweep
from .invariants import run_invariants
from .main import main, run

__all__ = [
    "COMMANDS",
    "cmd_darboux",
    "cmd_invariants",
    "cmd_surface",
    "cmd_sweep",
    "main",
    "run",
    "run_invariants",
]
