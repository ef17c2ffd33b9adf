"""Measurements on the propagated wave packet.

Observers defined here are attached to :func:`mwfzp.propagator.evolve`;
the remaining functions turn their records into transmission, focal
lengths, spot sizes and focusing efficiencies.
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks


@dataclass
class AxialProfile:
    """Time-integrated density along the optical axis (Y = 0)."""

    x_coords: np.ndarray
    intensity: np.ndarray
    sample_dT: float

    @classmethod
    def empty(cls, x_coords, sample_dT):
        x = np.asarray(x_coords, dtype=np.float64)
        return cls(x, np.zeros_like(x), sample_dT)


def axial_accumulate(profile, psi, iy):
    """Add ``|psi(X, 0)|^2 * sample_dT`` to ``profile`` in place and return it."""
    row = psi[:, iy]
    profile.intensity += (row.real ** 2 + row.imag ** 2) * profile.sample_dT
    return profile


@dataclass(frozen=True)
class FocalPoint:
    order: int
    position: float
    peak_intensity: float
    arrival_T: float = math.nan


def transmission(psi, grid, x_plane=0.0):
    """Probability beyond ``x_plane`` (cells with X > x_plane)."""
    right = grid.x > x_plane
    rho = psi[right].real ** 2 + psi[right].imag ** 2
    return float(rho.sum() * grid.cell_area)


def find_focal_points(profile, x_min, min_prominence=0.05):
    """Focal points from the axial profile beyond ``x_min``.

    Peaks need a prominence of at least ``min_prominence`` times the
    largest value in the searched range.  The farthest peak is taken as
    first order; any other peak gets the odd order nearest to
    ``f1 / position``.  Returned in order of decreasing position.
    """
    sel = profile.x_coords > x_min
    x = profile.x_coords[sel]
    y = profile.intensity[sel]
    if y.size < 3 or not np.any(y > 0):
        return []
    idx, _ = find_peaks(y, prominence=min_prominence * y.max())
    if idx.size == 0:
        return []
    idx = idx[np.argsort(x[idx])[::-1]]
    f1 = x[idx[0]]
    points = [FocalPoint(1, float(f1), float(y[idx[0]]))]
    for i in idx[1:]:
        ratio = f1 / x[i] if x[i] > 0 else math.inf
        order = max(1, 2 * int(round((ratio - 1.0) / 2.0)) + 1) if math.isfinite(ratio) else 0
        points.append(FocalPoint(order, float(x[i]), float(y[i])))
    return points


def refine_peak(x, y, i):
    """Sub-cell peak position from a parabola through three samples."""
    if 0 < i < len(y) - 1:
        a, b, c = y[i - 1], y[i], y[i + 1]
        den = a - 2 * b + c
        if den < 0:
            return float(x[i] + 0.5 * (a - c) / den * (x[1] - x[0]))
    return float(x[i])


def fwhm(profile, coords, center=None):
    """Full width at half maximum around the maximum nearest ``center``.

    Half-maximum crossings are located by linear interpolation.  Returns
    ``(width, peak_coordinate)``.
    """
    p = np.asarray(profile, dtype=np.float64)
    c = np.asarray(coords, dtype=np.float64)
    if center is None:
        i = int(np.argmax(p))
    else:
        i = int(np.argmin(np.abs(c - center)))
        # climb to the local maximum
        while 0 < i < len(p) - 1 and max(p[i - 1], p[i + 1]) > p[i]:
            i = i - 1 if p[i - 1] > p[i + 1] else i + 1
    half = 0.5 * p[i]
    if half <= 0:
        return 0.0, float(c[i])
    lo = i
    while lo > 0 and p[lo] > half:
        lo -= 1
    hi = i
    while hi < len(p) - 1 and p[hi] > half:
        hi += 1
    if p[lo] > half:
        xl = c[lo]
    else:
        xl = c[lo] + (half - p[lo]) / (p[lo + 1] - p[lo]) * (c[lo + 1] - c[lo])
    if p[hi] > half:
        xr = c[hi]
    else:
        xr = c[hi - 1] + (half - p[hi - 1]) / (p[hi] - p[hi - 1]) * (c[hi] - c[hi - 1])
    return float(xr - xl), float(c[i])


def _density(field_):
    f = np.asarray(field_)
    if np.iscomplexobj(f):
        return f.real ** 2 + f.imag ** 2
    return f.astype(np.float64)


def spot_fwhm(psi_at_focus, focus, grid, axis_tol_cells=2):
    """Transverse FWHM of the density at ``X = focus.position``.

    Accepts the complex wave function or its density.  Warns if the
    transverse maximum sits more than ``axis_tol_cells`` off axis.
    """
    rho = _density(psi_at_focus)
    ix = grid.x_index(focus.position)
    width, yc = fwhm(rho[ix], grid.y, center=0.0)
    if abs(yc) > axis_tol_cells * grid.dy:
        warnings.warn(f"focal spot peak at Y={yc:.2f}, off axis", stacklevel=2)
    return width


@dataclass(frozen=True)
class WindowRule:
    """Integration window for focusing efficiency.

    The window is centred on the focal peak and extends ``scale_x * FWHM_X``
    along X and ``scale_y * FWHM_Y`` along Y on either side.
    """

    scale_x: float = 1.0
    scale_y: float = 1.0


def efficiency(psi_at_focus, focus, grid, rule=WindowRule(), I_initial=1.0):
    """Probability inside the focal window divided by ``I_initial``."""
    rho = _density(psi_at_focus)
    iy0 = grid.y_index(0.0)
    wx, xc = fwhm(rho[:, iy0], grid.x, center=focus.position)
    wy = spot_fwhm(rho, FocalPoint(focus.order, xc, focus.peak_intensity), grid)
    X, Y = grid.x, grid.y
    in_x = np.abs(X - xc) <= rule.scale_x * wx
    in_y = np.abs(Y) <= rule.scale_y * wy
    return float(rho[np.ix_(in_x, in_y)].sum() * grid.cell_area / I_initial)


def calibrate_window(psi_at_focus, focus, grid, target, scale_x=1.0, lo=0.05, hi=40.0,
                     tol=1e-4):
    """Smallest transverse scale whose efficiency reaches ``target``.

    The axial extent stays at ``scale_x``.  Efficiency grows in steps with
    the window, so this bisects rather than root-finding.  Raises
    ``ValueError`` if even ``hi`` falls short.
    """
    def eta(s):
        return efficiency(psi_at_focus, focus, grid, WindowRule(scale_x, s))

    if eta(hi) < target:
        raise ValueError(f"window scale {hi} still below target efficiency {target}")
    if eta(lo) >= target:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if eta(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def induced_phase_shift(W_path, ds, velocity, scaling):
    """Phase (radians) accumulated along a straight path.

    ``W_path`` holds the scaled induced potential sampled every ``ds``
    scaled lengths; the result is ``-(1/(hbar v)) * integral V dl``.
    """
    hbar = scaling.V0 * scaling.tau
    integral = trapezoid(np.asarray(W_path, dtype=np.float64), dx=ds) * scaling.V0 * scaling.beta
    return float(-integral / (hbar * velocity))


def path_through_zone(grid, spec, mask, zone, W_induced):
    """Samples of ``W_induced`` on the X-directed midline of transparent ``zone``.

    Runs from the front to the back face of the slab.
    """
    if zone % 2 == 1:
        raise ValueError("opaque zones cannot carry a transmitted path")
    r = spec.radii()
    y_mid = 0.5 * (r[zone - 1] + r[zone])
    iy = grid.y_index(y_mid)
    xs = grid.x
    sel = (xs >= spec.x_front - 1e-9) & (xs <= spec.x_back + 1e-9)
    if np.any(mask[sel, iy] > 0):
        raise ValueError(f"path through zone {zone} crosses opaque cells")
    return W_induced[sel, iy]


# ---------------------------------------------------------------- observers

class AxialObserver:
    """Accumulates the axial profile and the time each axial cell peaks."""

    def __init__(self, grid, dT, every=5):
        self.every = every
        self.iy = grid.y_index(0.0)
        self.profile = AxialProfile.empty(grid.x, every * dT)
        self.peak_density = np.zeros(grid.nx)
        self.peak_time = np.full(grid.nx, np.nan)

    def __call__(self, step, T, psi):
        if step == 0:
            return
        row = psi[:, self.iy]
        rho = row.real ** 2 + row.imag ** 2
        self.profile.intensity += rho * self.profile.sample_dT
        up = rho > self.peak_density
        self.peak_density[up] = rho[up]
        self.peak_time[up] = T


class TransmissionObserver:
    """Probability beyond a plane, including what the absorber removed there.

    The absorber multiplies ``psi`` by a known mask ``m`` each step, so the
    probability it removed is recoverable from the post-step density as
    ``rho * (1/m^2 - 1)``.  Must be called every step.
    """

    every = 1

    def __init__(self, grid, absorber, x_plane=0.0, record_every=20):
        right = grid.x > x_plane
        self.area = grid.cell_area
        self.right = right
        w = np.zeros(grid.shape)
        m2 = absorber[right] ** 2
        w[right] = np.where(m2 < 1.0, 1.0 / np.maximum(m2, 1e-300) - 1.0, 0.0)
        self._ij = np.nonzero(w)
        self._w = w[self._ij]
        self.absorbed = 0.0
        self.record_every = record_every
        self.times, self.inside, self.cumulative = [], [], []

    def __call__(self, step, T, psi):
        if step > 0:
            sub = psi[self._ij]
            self.absorbed += float(np.dot(sub.real ** 2 + sub.imag ** 2, self._w)) * self.area
        if step % self.record_every == 0:
            inside = transmission_mask(psi, self.right) * self.area
            self.times.append(T)
            self.inside.append(inside)
            self.cumulative.append(inside + self.absorbed)

    @property
    def value(self):
        """Total probability that has crossed the plane."""
        return self.cumulative[-1] if self.cumulative else 0.0


def transmission_mask(psi, right):
    sub = psi[right]
    return float(np.sum(sub.real ** 2 + sub.imag ** 2))


class DensitySnapshots:
    """Float32 density snapshots of the region beyond ``x_min``."""

    def __init__(self, grid, dT, x_min, interval=1.0):
        self.every = max(1, int(round(interval / dT)))
        self.i0 = int(np.searchsorted(grid.x, x_min))
        self.times, self.frames = [], []

    def __call__(self, step, T, psi):
        sub = psi[self.i0:]
        self.times.append(T)
        self.frames.append((sub.real ** 2 + sub.imag ** 2).astype(np.float32))

    def nearest(self, T):
        """``(time, full-width density array)`` of the frame closest to ``T``."""
        k = int(np.argmin(np.abs(np.asarray(self.times) - T)))
        return self.times[k], self.frames[k]

    def embed(self, frame, grid):
        full = np.zeros(grid.shape)
        full[self.i0:] = frame
        return full


class SnapshotObserver:
    """Complex wave-function copies at requested times."""

    def __init__(self, dT, times):
        self.every = 1
        self.targets = {int(round(t / dT)): t for t in times}
        self.snapshots = {}

    def __call__(self, step, T, psi):
        if step in self.targets:
            self.snapshots[self.targets[step]] = psi.copy()


@dataclass
class DiagnosticsReport:
    Tc: float
    focal_points: list
    sigma_F1: float
    eta: list                        # [(order, efficiency), ...]
    Tc_plane: float = math.nan       # Eq.-13 integral at its maximum
    f_cal: float = math.nan
    sigma_Y: float = math.nan
    warnings: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    @property
    def f1(self):
        fp = [p for p in self.focal_points if p.order == 1]
        return fp[0].position if fp else math.nan

    def eta_of(self, order):
        for o, e in self.eta:
            if o == order:
                return e
        return math.nan
