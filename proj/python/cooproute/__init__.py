"""Equilibria of routing games with cooperating users."""

from ._core import (
    ConfigError,
    ConvergenceError,
    Error,
    InfeasibleError,
    __version__,
    canonical_config,
    mixed,
    preset_names,
    solve,
    sweep,
    verify,
    wardrop_split,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "Error",
    "InfeasibleError",
    "__version__",
    "canonical_config",
    "mixed",
    "preset_names",
    "solve",
    "sweep",
    "verify",
    "wardrop_split",
]
