"""Two-mode simulator for a 2-boson + 2-fermion mixture in a 1D double well."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DwmixError,
    ModelValidityError,
    SolverError,
    SweepError,
)
from .config import RunConfig, load_config, parse_config
from .model import ModelContext, build_context

__all__ = [
    "ConfigError",
    "DwmixError",
    "ModelValidityError",
    "ModelContext",
    "RunConfig",
    "SolverError",
    "SweepError",
    "build_context",
    "load_config",
    "parse_config",
    "__version__",
]
