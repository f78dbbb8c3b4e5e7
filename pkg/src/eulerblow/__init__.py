"""Gradient blow-up for the 1D Lagrangian p-system with a general pressure law."""

from . import eos, riccati, solver, thermo, verify
from .config import RunConfig, load_config, parse_config
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["eos", "thermo", "solver", "riccati", "verify", "RunConfig", "load_config",
           "parse_config", "BACKEND", "__version__"]
