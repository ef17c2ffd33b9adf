"""Physical constants and the nondimensional unit system.

Lengths are measured in units of ``beta``, times in units of
``tau = 2 m beta^2 / hbar`` and energies in units of
``V0 = hbar^2 / (2 m beta^2)``.  With these choices the Schrodinger
equation for a helium atom reads ``i dpsi/dT = (-laplacian + W) psi``.
"""
from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values in SI units."""

    hbar: float = 1.054571817e-34
    m_He: float = 6.6464731e-27
    k_B: float = 1.380649e-23
    eps0: float = 8.8541878128e-12
    a0: float = 5.29177210903e-11

    def __post_init__(self):
        for name in ("hbar", "m_He", "k_B", "eps0", "a0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def h(self):
        return 2.0 * math.pi * self.hbar


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class ScalingFactors:
    beta: float  # m
    tau: float   # s
    V0: float    # J

    def length(self, x_m):
        """SI length -> scaled length."""
        return x_m / self.beta

    def energy(self, e_J):
        """SI energy -> scaled energy."""
        return e_J / self.V0

    def time(self, t_s):
        return t_s / self.tau


def scaling_from_beta(beta, constants=CODATA):
    """Scaling factors for a given length unit ``beta`` (metres)."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    c = constants
    V0 = c.hbar ** 2 / (2.0 * c.m_He * beta ** 2)
    tau = 2.0 * c.m_He * beta ** 2 / c.hbar
    return ScalingFactors(beta=beta, tau=tau, V0=V0)


def de_broglie_from_velocity(v, constants=CODATA):
    """Wavelength h / (m v) in metres for a helium atom moving at ``v`` m/s."""
    if not v > 0:
        raise ValueError(f"velocity must be positive, got {v!r}")
    return constants.h / (constants.m_He * v)


def de_broglie_from_temperature(T_a, constants=CODATA):
    """Thermal wavelength h / sqrt(3 m k_B T_a) in metres."""
    if not T_a > 0:
        raise ValueError(f"temperature must be positive, got {T_a!r}")
    c = constants
    return c.h / math.sqrt(3.0 * c.m_He * c.k_B * T_a)


def temperature_from_de_broglie(lambda_dB, constants=CODATA):
    """Inverse of :func:`de_broglie_from_temperature`."""
    if not lambda_dB > 0:
        raise ValueError(f"wavelength must be positive, got {lambda_dB!r}")
    c = constants
    return c.h ** 2 / (3.0 * c.m_He * c.k_B * lambda_dB ** 2)


def velocity_from_de_broglie(lambda_dB, constants=CODATA):
    if not lambda_dB > 0:
        raise ValueError(f"wavelength must be positive, got {lambda_dB!r}")
    return constants.h / (constants.m_He * lambda_dB)
