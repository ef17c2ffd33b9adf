"""Split-step Fourier propagation of the scaled Schrodinger equation.

Units follow :mod:`mwfzp.units`, so the Hamiltonian is ``-laplacian + W``
and a plane wave ``exp(i K.R)`` has energy ``|K|^2``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, NumericalError

PROFILES = ("cosine-squared", "exponential")


@dataclass(frozen=True)
class WavePacketSpec:
    sigma_X: float
    sigma_Y: float
    X0: float
    Y0: float
    K0: float

    def __post_init__(self):
        if not (self.sigma_X > 0 and self.sigma_Y > 0):
            raise ValueError("packet widths must be positive")

    @classmethod
    def from_wavelength(cls, sigma_X, sigma_Y, X0, Y0, lambda_dB):
        return cls(sigma_X, sigma_Y, X0, Y0, 2.0 * math.pi / lambda_dB)


def gaussian_packet(grid, spec, edge_tol=1e-3):
    """Normalised Gaussian packet moving along +X.

    Raises ``ConfigurationError`` if the probability density anywhere on the
    grid border exceeds ``edge_tol`` times its peak, i.e. the packet does
    not fit in the box.
    """
    X, Y = grid.mesh()
    u = (X - spec.X0) / spec.sigma_X
    v = (Y - spec.Y0) / spec.sigma_Y
    psi = np.exp(-0.5 * (u ** 2 + v ** 2) + 1j * spec.K0 * (X - spec.X0))
    rho = psi.real ** 2 + psi.imag ** 2
    border = max(rho[0].max(), rho[-1].max(), rho[:, 0].max(), rho[:, -1].max())
    if border > edge_tol * rho.max():
        raise ConfigurationError(
            f"packet clipped by the grid (edge density {border / rho.max():.2e} of peak)",
            key="packet")
    psi /= math.sqrt(rho.sum() * grid.cell_area)
    return psi


@dataclass(frozen=True)
class AbsorberSpec:
    """Boundary absorber applied as an amplitude mask after every step.

    ``strength`` is an absorption rate per unit scaled time, so the
    per-step mask depends on the step size.
    """

    band_cells: int = 50
    profile: str = "cosine-squared"
    strength: float = 0.5

    def __post_init__(self):
        if self.band_cells < 0:
            raise ValueError("band_cells must be >= 0")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown absorber profile {self.profile!r}")
        if self.strength < 0:
            raise ValueError("strength must be >= 0")


def _edge_profile(n, spec, dT):
    m = np.ones(n)
    b = spec.band_cells
    if b == 0 or spec.strength == 0:
        return m
    # depth into the band: small at the inner edge, < 1 at the outermost cell
    u = np.arange(1, b + 1) / (b + 1)
    if spec.profile == "cosine-squared":
        ramp = np.cos(0.5 * np.pi * u) ** (2.0 * spec.strength * dT)
    else:
        ramp = np.exp(-spec.strength * dT * 8.0 * u ** 2)
    m[:b] = ramp[::-1]
    m[n - b:] = ramp
    return m


def absorber_mask(grid, spec, dT=1.0):
    """Separable per-step mask: 1 in the interior, decaying towards the border."""
    if 2 * spec.band_cells >= min(grid.nx, grid.ny):
        raise ValueError("absorber band wider than half the grid")
    return np.outer(_edge_profile(grid.nx, spec, dT), _edge_profile(grid.ny, spec, dT))


def kinetic_symbol(grid, shape=None):
    """``Kx^2 + Ky^2`` on the FFT frequency grid (of ``shape`` if given)."""
    nx, ny = shape if shape is not None else grid.shape
    kx = 2.0 * np.pi * sfft.fftfreq(nx, grid.dx)
    ky = 2.0 * np.pi * sfft.fftfreq(ny, grid.dy)
    return kx[:, None] ** 2 + ky[None, :] ** 2


def padded_shape(grid):
    """Smallest FFT-friendly shape at least as large as the grid."""
    return sfft.next_fast_len(grid.nx), sfft.next_fast_len(grid.ny)


def step(psi, W_total, absorber, dT, grid, kinetic_phase=None):
    """One symmetric split step followed by the boundary mask.

    Returns a new array; ``psi`` is not modified.
    """
    if not dT > 0:
        raise ValueError("dT must be positive")
    half = np.exp(-0.5j * dT * W_total)
    if kinetic_phase is None:
        kinetic_phase = np.exp(-1j * dT * kinetic_symbol(grid))
    out = sfft.ifft2(kinetic_phase * sfft.fft2(half * psi))
    out *= half
    out *= absorber
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite wave function after split step")
    return out


class SplitStepper:
    """Precomputed phase factors for repeated stepping on one grid.

    With ``shape`` larger than the grid, the periodic FFT box is extended
    by free cells carrying the outermost absorber value.  Prime grid sizes
    such as 701 then transform at fast-length speed; the result is
    unchanged as long as the absorber keeps the border empty.
    """

    def __init__(self, grid, W_total, absorber, dT, shape=None):
        if not dT > 0:
            raise ValueError("dT must be positive")
        grid.check_field(W_total, "W_total")
        grid.check_field(absorber, "absorber")
        shape = tuple(shape) if shape is not None else grid.shape
        if shape[0] < grid.nx or shape[1] < grid.ny:
            raise ValueError("FFT shape smaller than the grid")
        self.grid = grid
        self.dT = dT
        self.shape = shape
        W = np.zeros(shape)
        W[:grid.nx, :grid.ny] = W_total
        m = np.full(shape, float(np.min(absorber)) if shape != grid.shape else 1.0)
        m[:grid.nx, :grid.ny] = absorber
        self.half = np.exp(-0.5j * dT * W)
        self.kinetic = np.exp(-1j * dT * kinetic_symbol(grid, shape))
        self.post = self.half * m

    def embed(self, psi):
        out = np.zeros(self.shape, dtype=np.complex128)
        out[:self.grid.nx, :self.grid.ny] = psi
        return out

    def crop(self, psi):
        return psi[:self.grid.nx, :self.grid.ny]

    def __call__(self, psi):
        psi = psi * self.half
        psi = sfft.fft2(psi, overwrite_x=True)
        psi *= self.kinetic
        psi = sfft.ifft2(psi, overwrite_x=True)
        psi *= self.post
        return psi


@dataclass
class Evolution:
    psi: np.ndarray
    times: np.ndarray       # sampling times of the norm series
    norms: np.ndarray
    observers: list = field(default_factory=list)
    steps: int = 0


def _norm(psi, area):
    return float(np.vdot(psi, psi).real * area) if psi.flags.c_contiguous else \
        float(np.sum(psi.real ** 2 + psi.imag ** 2) * area)


def evolve(psi0, W_total, absorber, dT, T_max, grid, observers=(), norm_every=5,
           pad_fft=False):
    """Advance ``psi0`` for ``ceil(T_max / dT)`` steps.

    Each observer is a callable ``obs(step, T, psi)`` with an integer
    attribute ``every``; it is invoked after every ``every``-th step and at
    ``T = 0``.  The norm is sampled every ``norm_every`` steps.
    ``pad_fft`` extends the FFT box to a fast length (see
    :class:`SplitStepper`); observers still see the grid-sized field.
    """
    if not T_max > 0:
        raise ValueError("T_max must be positive")
    shape = padded_shape(grid) if pad_fft else None
    stepper = SplitStepper(grid, W_total, absorber, dT, shape=shape)
    nsteps = int(math.ceil(T_max / dT - 1e-9))
    area = grid.cell_area
    work = stepper.embed(psi0)
    psi = stepper.crop(work)
    times, norms = [0.0], [_norm(psi, area)]
    for obs in observers:
        obs(0, 0.0, psi)
    for s in range(1, nsteps + 1):
        work = stepper(work)
        psi = stepper.crop(work)
        T = s * dT
        if s % norm_every == 0 or s == nsteps:
            n = _norm(psi, area)
            if not math.isfinite(n):
                raise NumericalError(f"non-finite norm at T={T:.4g}")
            times.append(T)
            norms.append(n)
        for obs in observers:
            if s % obs.every == 0:
                obs(s, T, psi)
    return Evolution(np.array(psi), np.array(times), np.array(norms), list(observers), nsteps)
