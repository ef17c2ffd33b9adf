"""Exception types raised across the simulator."""


class ConfigurationError(ValueError):
    """Invalid or inconsistent run configuration.

    ``key`` names the offending configuration entry when one is known.
    """

    def __init__(self, message, key=None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key


class ConvergenceError(RuntimeError):
    """Iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual, iterations):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class NumericalError(RuntimeError):
    """Non-finite values appeared during time evolution."""
