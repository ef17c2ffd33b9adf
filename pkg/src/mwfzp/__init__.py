"""Matter-wave focusing by a biased Fresnel zone plate.

Split-step Fourier propagation of a helium wave packet through a
chromium zone plate with Casimir-van der Waals and field-induced
polarisation potentials.
"""
from .config import RunConfig, parse_config, preset
from .errors import ConfigurationError, ConvergenceError, NumericalError
from .runner import run_single, run_sweep

__all__ = ["RunConfig", "parse_config", "preset", "run_single", "run_sweep",
           "ConfigurationError", "ConvergenceError", "NumericalError"]
__version__ = "0.1.0"
