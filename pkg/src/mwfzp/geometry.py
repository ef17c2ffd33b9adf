"""Negative Fresnel zone plate: layout, opacity mask and distance field.

The plate is a slab ``x_front <= X <= x_front + d`` whose transverse
structure is the 1D zone sequence ``r_n = sqrt(n * lambda_dB * f_cal)``.
Odd zones (including the central one) are opaque; beyond the last zone
the slab continues as an opaque support out to the domain edge.
All lengths are in scaled units.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigurationError

# Cell centres lying on a slab face count as inside the slab.
_FACE_TOL = 1e-9


@dataclass(frozen=True)
class ZonePlateSpec:
    r1: float
    lambda_dB: float
    f_cal: float
    d: float
    W_g0: float
    n_zones: int
    x_front: float = 0.0

    def __post_init__(self):
        if not (self.r1 > 0 and self.lambda_dB > 0 and self.f_cal > 0):
            raise ValueError("r1, lambda_dB and f_cal must be positive")
        if not math.isclose(self.r1 ** 2, self.lambda_dB * self.f_cal, rel_tol=1e-9):
            raise ValueError("r1^2 must equal lambda_dB * f_cal")
        if not self.d > 0:
            raise ValueError("plate thickness d must be positive")
        if not self.W_g0 > 0:
            raise ValueError("barrier height W_g0 must be positive")
        if int(self.n_zones) != self.n_zones or self.n_zones < 1:
            raise ValueError("n_zones must be a positive integer")

    @classmethod
    def from_r1(cls, r1, lambda_dB, **kw):
        """Plate with first-zone radius ``r1``; ``f_cal = r1^2 / lambda_dB``."""
        return cls(r1=r1, lambda_dB=lambda_dB, f_cal=r1 ** 2 / lambda_dB, **kw)

    @classmethod
    def from_focal_length(cls, f_cal, lambda_dB, **kw):
        return cls(r1=math.sqrt(lambda_dB * f_cal), lambda_dB=lambda_dB, f_cal=f_cal, **kw)

    @property
    def x_back(self):
        return self.x_front + self.d

    def radii(self):
        """``[r_0, r_1, ..., r_N]`` with ``r_0 = 0`` and ``N = n_zones``."""
        return np.sqrt(np.arange(self.n_zones + 1) * self.lambda_dB * self.f_cal)


def zone_radius(n, spec):
    if int(n) != n or not 1 <= n <= spec.n_zones:
        raise ValueError(f"zone index {n!r} outside 1..{spec.n_zones}")
    return math.sqrt(n * spec.lambda_dB * spec.f_cal)


def default_barrier_height(lambda_dB, factor=30.0):
    """``factor`` times the scaled kinetic energy ``K0^2`` of the incident atom."""
    return factor * (2.0 * math.pi / lambda_dB) ** 2


def auto_zone_count(half_width, lambda_dB, f_cal):
    """Largest ``n`` with ``r_n <= half_width``."""
    n = int(math.floor(half_width ** 2 / (lambda_dB * f_cal) * (1 + 1e-12)))
    if n < 1:
        raise ConfigurationError("domain narrower than the central zone", key="n_zones")
    return n


def zone_index(y, spec):
    """Zone number containing transverse coordinate ``y``.

    Zone ``n`` is ``r_{n-1} < |y| <= r_n`` (the centre belongs to zone 1);
    points beyond ``r_N`` return ``N + 1`` (the opaque support).
    """
    r = spec.radii()
    n = np.searchsorted(r, np.abs(y), side="left")
    return np.maximum(n, 1)


def is_opaque_zone(n, spec):
    n = np.asarray(n)
    return (n % 2 == 1) | (n > spec.n_zones)


def _in_slab(x, spec):
    tol = _FACE_TOL
    return (x >= spec.x_front - tol) & (x <= spec.x_back + tol)


def build_opacity_mask(grid, spec):
    """0/1 array marking opaque material, rasterised by cell centre."""
    x, y = grid.x, grid.y
    if spec.x_front < x[0] or spec.x_back > x[-1]:
        raise ConfigurationError("zone plate slab lies outside the grid", key="d")
    r = spec.radii()
    outer_width = r[-1] - r[-2]
    if outer_width < 2 * grid.dy:
        raise ConfigurationError(
            f"outermost zone is {outer_width / grid.dy:.2f} cells wide; at least 2 required",
            key="n_zones")
    in_slab = _in_slab(x, spec)
    opaque_y = is_opaque_zone(zone_index(y, spec), spec)
    return np.outer(in_slab, opaque_y).astype(np.float64)


def geometric_potential(mask, W_g0):
    return W_g0 * np.asarray(mask, dtype=np.float64)


def _y_offsets(y, spec):
    """Signed Y offset from the nearest opaque zone edge (0 inside opaque zones)."""
    r = spec.radii()
    ay = np.abs(y)
    n = zone_index(y, spec)
    open_ = ~is_opaque_zone(n, spec)
    sign = np.where(y < 0, -1.0, 1.0)
    off = np.zeros_like(ay)
    nn = n[open_]
    lower = ay[open_] - r[nn - 1]
    upper = r[nn] - ay[open_]
    off[open_] = np.where(lower <= upper, lower, -upper) * sign[open_]
    return off


def _x_offsets(x, spec):
    tol = _FACE_TOL
    off = np.zeros_like(x)
    front = x < spec.x_front - tol
    back = x > spec.x_back + tol
    off[front] = x[front] - spec.x_front
    off[back] = x[back] - spec.x_back
    return off


def surface_offsets(grid, spec):
    """Vector from the nearest point of opaque material to each cell centre.

    The opaque region is the product of the slab interval in X and the
    opaque zone set in Y, so the Euclidean nearest point separates into
    independent X and Y offsets.
    """
    ox = _x_offsets(grid.x, spec)
    oy = _y_offsets(grid.y, spec)
    dX = np.broadcast_to(ox[:, None], grid.shape).copy()
    dY = np.broadcast_to(oy[None, :], grid.shape).copy()
    return dX, dY


def distance_field(grid, spec):
    """Distance ``chi`` from each cell centre to the nearest plate surface.

    Inside transparent channels this is the transverse distance to the
    channel wall; in front of or behind the slab it is the Euclidean
    distance to the material.  Opaque cells carry 0.
    """
    dX, dY = surface_offsets(grid, spec)
    return np.hypot(dX, dY)
