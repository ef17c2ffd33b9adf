"""Electrostatic biasing of the zone plate.

The opaque zones act as Dirichlet electrodes inside a grounded box.  The
potential is found with red-black successive over-relaxation, the field
by finite differences, and the helium polarisation energy from the field.
"""
from dataclasses import dataclass, field
import math
import warnings

import numba
import numpy as np

from .errors import ConvergenceError
from .geometry import build_opacity_mask, zone_index
from .units import CODATA

SCHEMES = ("unbiased", "uniform", "sqrt_n", "sinusoidal")

# Studied ranges; outside them a warning is issued, not an error.
_V1_RANGE = {"uniform": 30.0, "sqrt_n": 5.0, "sinusoidal": 30.0}
_KE_RANGE = (0.01, 0.4)


@dataclass(frozen=True)
class BiasScheme:
    variant: str = "unbiased"
    V1: float = 0.0
    k_E: float = 0.0

    def __post_init__(self):
        if self.variant not in SCHEMES:
            raise ValueError(f"unknown bias scheme {self.variant!r}; expected one of {SCHEMES}")
        vmax = _V1_RANGE.get(self.variant)
        if vmax is not None and not 0.0 <= self.V1 <= vmax:
            warnings.warn(f"V1={self.V1} V outside the studied range [0, {vmax}] V "
                          f"for the {self.variant} scheme", stacklevel=2)
        if self.variant == "sinusoidal" and not _KE_RANGE[0] <= self.k_E <= _KE_RANGE[1]:
            warnings.warn(f"k_E={self.k_E} outside the studied range {_KE_RANGE}", stacklevel=2)

    @property
    def is_biased(self):
        return self.variant != "unbiased" and self.V1 != 0.0

    def voltage(self, n):
        """Voltage on zone ``n`` (scalar or array)."""
        n = np.asarray(n, dtype=np.float64)
        if self.variant == "unbiased":
            v = np.zeros_like(n)
        elif self.variant == "uniform":
            v = np.full_like(n, self.V1)
        elif self.variant == "sqrt_n":
            v = self.V1 * np.sqrt(n)
        else:
            v = self.V1 * np.sin(self.k_E * n)
        return v if v.ndim else float(v)


def bias_voltages(scheme, n_zones):
    """``{n: V_n}`` for every opaque (odd) zone index up to ``n_zones``."""
    if n_zones < 1:
        raise ValueError("n_zones must be >= 1")
    return {n: scheme.voltage(n) for n in range(1, n_zones + 1, 2)}


def electrode_zone(n, n_zones):
    """Zone index whose voltage a cell in zone ``n`` carries.

    The support beyond the last zone is treated as one more opaque ring
    (index ``N + 1``) when ``N`` is even, and as part of zone ``N`` when
    ``N`` is odd and the two are contiguous.
    """
    n = np.asarray(n)
    support = n_zones if n_zones % 2 == 1 else n_zones + 1
    return np.where(n > n_zones, support, n)


@dataclass(frozen=True)
class PolarizabilityParams:
    """Static polarisability of helium as a volume in units of ``a0^3``."""

    alpha_a0: float = 1.383746
    constants: object = field(default=CODATA, repr=False)

    @property
    def alpha_volume(self):
        return self.alpha_a0 * self.constants.a0 ** 3

    @property
    def alpha_SI(self):
        return 4.0 * math.pi * self.constants.eps0 * self.alpha_volume


@dataclass(frozen=True)
class ElectrostaticSolution:
    potential: np.ndarray  # volts
    field_x: np.ndarray    # V/m
    field_y: np.ndarray
    residual: float
    iterations: int
    omega: float
    history: np.ndarray = field(repr=False, default=None)


@numba.njit(cache=True)
def _sor(phi, fixed, omega, tol_abs, diverge, max_iter, history):
    nx, ny = phi.shape
    for it in range(max_iter):
        maxdelta = 0.0
        for colour in range(2):
            for i in range(1, nx - 1):
                j0 = 1 + (i + colour + 1) % 2
                for j in range(j0, ny - 1, 2):
                    if fixed[i, j]:
                        continue
                    gs = 0.25 * (phi[i - 1, j] + phi[i + 1, j] + phi[i, j - 1] + phi[i, j + 1])
                    delta = omega * (gs - phi[i, j])
                    phi[i, j] += delta
                    a = abs(delta)
                    if a > maxdelta:
                        maxdelta = a
        history[it] = maxdelta
        if not np.isfinite(maxdelta) or maxdelta > diverge:
            return it + 1, maxdelta, -1
        if maxdelta <= tol_abs:
            return it + 1, maxdelta, 1
    return max_iter, maxdelta, 0


def solve_laplace_sor(dirichlet, fixed, omega=1.9, tol=1e-8, max_iter=200_000,
                      dx=1.0, fallback_omega=1.5):
    """Solve Laplace's equation with Dirichlet nodes by red-black SOR.

    Parameters
    ----------
    dirichlet : (nx, ny) ndarray
        Prescribed voltages; only read where ``fixed`` is true.
    fixed : (nx, ny) bool ndarray
        Dirichlet nodes.  The outer ring of the array is always held at
        its ``dirichlet`` value (normally 0 V, a grounded box).
    omega : float
        Over-relaxation factor in (1, 2).  If the iteration diverges it is
        restarted once with ``fallback_omega``.
    tol : float
        Stop when the largest single-node update, divided by the largest
        prescribed voltage magnitude, falls below this.
    dx : float
        Grid spacing in metres, used for the returned field.

    Returns
    -------
    ElectrostaticSolution
    """
    if not 1.0 < omega < 2.0:
        raise ValueError(f"omega must lie in (1, 2), got {omega}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    dirichlet = np.asarray(dirichlet, dtype=np.float64)
    fixed = np.array(fixed, dtype=np.bool_)
    fixed[0, :] = fixed[-1, :] = fixed[:, 0] = fixed[:, -1] = True
    scale = float(np.max(np.abs(dirichlet[fixed]))) if fixed.any() else 0.0
    if scale == 0.0:
        phi = np.zeros_like(dirichlet)
        ex, ey = electric_field(phi, dx)
        return ElectrostaticSolution(phi, ex, ey, 0.0, 0, omega, np.zeros(0))

    for w in (omega, fallback_omega):
        phi = np.where(fixed, dirichlet, 0.0)
        history = np.zeros(max_iter)
        iters, delta, status = _sor(phi, fixed, w, tol * scale, 1e3 * scale, max_iter, history)
        if status >= 0:
            break
        warnings.warn(f"SOR diverged with omega={w}; retrying with {fallback_omega}")
    residual = delta / scale
    if status != 1:
        raise ConvergenceError("SOR did not converge", residual, iters)
    ex, ey = electric_field(phi, dx)
    return ElectrostaticSolution(phi, ex, ey, residual, iters, w, history[:iters])


def electric_field(potential, dx=1.0, dy=None):
    """``E = -grad V``: central differences inside, one-sided at the edges."""
    gx, gy = np.gradient(np.asarray(potential, dtype=np.float64), dx, dx if dy is None else dy)
    return -gx, -gy


def electrode_layout(grid, spec, scheme):
    """Dirichlet values and node mask for the biased plate on ``grid``."""
    mask = build_opacity_mask(grid, spec) > 0.5
    n = electrode_zone(zone_index(grid.y, spec), spec.n_zones)
    v_row = scheme.voltage(n)
    dirichlet = np.where(mask, v_row[None, :], 0.0)
    return dirichlet, mask


def solve_plate(grid, spec, scheme, scaling, omega=1.9, tol=1e-8, max_iter=200_000):
    """Electrostatic solution for the biased plate in a grounded box."""
    dirichlet, fixed = electrode_layout(grid, spec, scheme)
    return solve_laplace_sor(dirichlet, fixed, omega=omega, tol=tol, max_iter=max_iter,
                             dx=grid.dx * scaling.beta)


def stark_energy(field_x, field_y, params):
    """First-order polarisation energy ``-(alpha/2)|E|^2`` in joules."""
    return -0.5 * params.alpha_SI * (field_x ** 2 + field_y ** 2)


def image_energy(field_x, field_y, chi_m, normal_x, normal_y, params, chi_min=0.0):
    """Image-dipole cross term in joules.

    ``normal_*`` give the unit vector from the nearest surface point to the
    atom; ``chi_m`` is the distance in metres, clamped below at ``chi_min``.
    """
    e2 = field_x ** 2 + field_y ** 2
    emag = np.sqrt(e2)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(emag > 0, (field_x * normal_x + field_y * normal_y) / emag, 0.0)
    chi = np.maximum(chi_m, chi_min)
    eps0 = params.constants.eps0
    return -params.alpha_SI ** 2 * e2 / (32 * math.pi * eps0) * (cos ** 2 + 1.0) / chi ** 3


def surface_normals(dX, dY):
    """Unit vectors from nearest material to each cell; +X inside the material."""
    chi = np.hypot(dX, dY)
    safe = np.where(chi > 0, chi, 1.0)
    nx = np.where(chi > 0, dX / safe, 1.0)
    ny = np.where(chi > 0, dY / safe, 0.0)
    return nx, ny


def induced_potential(field_x, field_y, chi, normals, params, scaling,
                      chi_min=10e-9, include_image=True):
    """Scaled polarisation energy of a helium atom in the bias field.

    ``chi`` is the scaled distance field and ``normals`` the pair returned by
    :func:`surface_normals`.  The image term's ``1/chi^3`` factor is
    evaluated with ``chi`` clamped to ``chi_min`` metres.
    """
    V = stark_energy(field_x, field_y, params)
    if include_image:
        V = V + image_energy(field_x, field_y, chi * scaling.beta, normals[0], normals[1],
                             params, chi_min=chi_min)
    return V / scaling.V0


def analytic_induced_sqrt(V1, lambda_dB, f_cal, params):
    """Continuum estimate of the in-zone energy (J) for ``V_n = V1 sqrt(n)``."""
    if V1 < 0:
        raise ValueError("V1 must be non-negative")
    return -params.alpha_SI * V1 ** 2 / (2.0 * lambda_dB * f_cal)


def analytic_induced_sin(V1, k_E, n, lambda_dB, f_cal, params):
    """Continuum estimate (J) for ``V_n = V1 sin(k_E n)`` inside zone ``n``."""
    if V1 < 0:
        raise ValueError("V1 must be non-negative")
    if np.any(np.asarray(n) < 1):
        raise ValueError("zone index must be >= 1")
    n = np.asarray(n, dtype=np.float64)
    return -2.0 * params.alpha_SI * V1 ** 2 * k_E ** 2 * n * np.cos(k_E * n) ** 2 / (lambda_dB * f_cal)
