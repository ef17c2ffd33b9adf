"""Single runs and parameter sweeps.

:func:`resolve` turns a :class:`~mwfzp.config.RunConfig` (SI inputs) into
scaled objects; :func:`run_single` executes the full pipeline and
:func:`run_sweep` maps it over a sweep specification.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging
import math
import os
import traceback
import warnings

import numpy as np
from scipy.constants import electron_volt

from . import io
from .config import from_dict, velocity_or_temperature
from .diagnostics import (AxialObserver, AxialProfile, DensitySnapshots, DiagnosticsReport,
                          SnapshotObserver, TransmissionObserver, WindowRule, efficiency,
                          find_focal_points, refine_peak, spot_fwhm)
from .electrostatics import (BiasScheme, PolarizabilityParams, induced_potential, solve_plate,
                             surface_normals)
from .errors import ConfigurationError
from .geometry import (ZonePlateSpec, auto_zone_count, build_opacity_mask, geometric_potential,
                       surface_offsets)
from .grid import GridSpec
from .potentials import CasimirParams, casimir_vdw, total_potential
from .propagator import AbsorberSpec, WavePacketSpec, absorber_mask, evolve, gaussian_packet
from .units import (de_broglie_from_temperature, de_broglie_from_velocity,
                    scaling_from_beta, velocity_from_de_broglie)

log = logging.getLogger(__name__)

DEFAULT_R1_NM = 200.0
MAX_FRAMES = 400           # cap on stored density snapshots per run
SWEEP_COLUMNS = ("Tc", "f1_over_fcal", "sigma_F1_over_sigma_Y", "eta_1", "eta_2", "eta_3")


@dataclass(frozen=True)
class ResolvedRun:
    """Scaled quantities derived from a config."""

    config: object
    scaling: object
    grid: GridSpec
    plate: ZonePlateSpec
    packet: WavePacketSpec
    absorber: AbsorberSpec
    bias: BiasScheme
    casimir: CasimirParams
    polarizability: PolarizabilityParams
    lambda_m: float
    velocity: float
    T_max: float
    dT: float


def resolve(cfg):
    """Validate cross-block consistency and convert to scaled units."""
    p, g, gr, pk, b, s = cfg.physical, cfg.geometry, cfg.grid, cfg.packet, cfg.bias, cfg.solver
    beta = gr.beta_nm * 1e-9
    scaling = scaling_from_beta(beta)
    kind, value = velocity_or_temperature(cfg)
    lam_m = de_broglie_from_velocity(value) if kind == "v" else de_broglie_from_temperature(value)
    lam = lam_m / beta
    K0 = 2.0 * math.pi / lam
    grid = GridSpec.centered(gr.nx, gr.ny, gr.dx)

    if g.W_g0_ueV is not None:
        W_g0 = g.W_g0_ueV * 1e-6 * electron_volt / scaling.V0
    else:
        W_g0 = g.W_g0_factor * K0 ** 2
    if g.f_cal_nm is not None:
        f_cal = g.f_cal_nm * 1e-9 / beta
    else:
        r1 = (g.r1_nm if g.r1_nm is not None else DEFAULT_R1_NM) * 1e-9 / beta
        f_cal = r1 ** 2 / lam
    if g.n_zones == "auto":
        half = min(abs(grid.y[0]), abs(grid.y[-1]))
        n_zones = auto_zone_count(half, lam, f_cal)
    else:
        n_zones = g.n_zones
    plate = ZonePlateSpec.from_focal_length(f_cal, lam, d=g.d_nm * 1e-9 / beta, W_g0=W_g0,
                                            n_zones=n_zones, x_front=g.x_front_nm * 1e-9 / beta)

    X0 = pk.X0_nm * 1e-9 / beta if pk.X0_nm is not None else -0.5 * f_cal
    packet = WavePacketSpec(pk.sigma_x_nm * 1e-9 / beta, pk.sigma_y_nm * 1e-9 / beta,
                            X0, pk.Y0_nm * 1e-9 / beta, K0)
    if not X0 < plate.x_front:
        raise ConfigurationError("packet must start in front of the plate", key="packet.X0_nm")
    absorber = AbsorberSpec(s.absorber_band, s.absorber_profile, s.absorber_strength)
    if s.T_max == "auto":
        # centre of the packet reaches the inner edge of the far absorber, plus 10 %
        x_edge = grid.x[-1] - s.absorber_band * grid.dx
        T_max = 1.1 * (x_edge - X0) / (2.0 * K0)
    else:
        T_max = float(s.T_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bias = BiasScheme(b.scheme, b.V1, b.k_E)
    return ResolvedRun(cfg, scaling, grid, plate, packet, absorber, bias,
                       CasimirParams(p.C3, p.l_nm * 1e-9, p.Lambda_nm * 1e-9),
                       PolarizabilityParams(p.alpha_a0), lam_m, velocity_from_de_broglie(lam_m),
                       T_max, s.dT)


@dataclass
class Potentials:
    mask: np.ndarray
    geometric: np.ndarray
    casimir: np.ndarray
    induced: np.ndarray
    total: np.ndarray
    chi: np.ndarray
    electrostatics: object = None


def build_potentials(rr):
    """Geometric, Casimir and induced fields for a resolved run."""
    cfg = rr.config
    grid, plate = rr.grid, rr.plate
    mask = build_opacity_mask(grid, plate)
    W_g = geometric_potential(mask, plate.W_g0)
    dX, dY = surface_offsets(grid, plate)
    chi = np.hypot(dX, dY)
    if cfg.physical.casimir:
        W_c = casimir_vdw(chi, rr.casimir, rr.scaling)
    else:
        W_c = np.zeros(grid.shape)
    sol = None
    if rr.bias.is_biased:
        s = cfg.solver
        sol = solve_plate(grid, plate, rr.bias, rr.scaling, omega=s.sor_omega, tol=s.sor_tol,
                          max_iter=s.sor_max_iter)
        log.info("SOR converged in %d iterations (omega %.3g)", sol.iterations, sol.omega)
        W_i = induced_potential(sol.field_x, sol.field_y, chi, surface_normals(dX, dY),
                                rr.polarizability, rr.scaling,
                                chi_min=rr.casimir.Lambda, include_image=cfg.bias.image_term)
    else:
        W_i = np.zeros(grid.shape)
    return Potentials(mask, W_g, W_c, W_i, total_potential(W_g, W_c, W_i), chi, sol)


@dataclass
class RunResult:
    report: DiagnosticsReport
    record: dict
    evolution: object
    potentials: Potentials
    axial: AxialProfile
    transmission: TransmissionObserver
    snapshots: dict
    frames: DensitySnapshots = None
    resolved: ResolvedRun = None


def _measure(rr, axial, trans, frames, dg, caught):
    grid, plate = rr.grid, rr.plate
    x_edge = grid.x[-1] - rr.absorber.band_cells * grid.dx
    keep = axial.profile.x_coords < x_edge
    prof = AxialProfile(axial.profile.x_coords[keep], axial.profile.intensity[keep],
                        axial.profile.sample_dT)
    raw = find_focal_points(prof, plate.x_back, dg.min_prominence)
    points = []
    for fp in raw:
        i = grid.x_index(fp.position)
        pos = refine_peak(prof.x_coords, prof.intensity, int(np.searchsorted(prof.x_coords, fp.position)))
        points.append(type(fp)(fp.order, pos, fp.peak_intensity, float(axial.peak_time[i])))

    rule = WindowRule(dg.window_scale_x, dg.window_scale_y)
    sigma_F1 = math.nan
    eta = []
    seen = set()
    for fp in points:
        if fp.order in seen or fp.order > dg.max_order or not math.isfinite(fp.arrival_T):
            continue
        seen.add(fp.order)
        _, frame = frames.nearest(fp.arrival_T)
        rho = frames.embed(frame, grid)
        cell = type(fp)(fp.order, float(grid.x[grid.x_index(fp.position)]), fp.peak_intensity,
                        fp.arrival_T)
        if fp.order == 1:
            sigma_F1 = spot_fwhm(rho, cell, grid)
        eta.append((fp.order, efficiency(rho, cell, grid, rule)))
    Tc = min(max(trans.value, 0.0), 1.0)
    return DiagnosticsReport(
        Tc=Tc, focal_points=points, sigma_F1=sigma_F1, eta=eta,
        Tc_plane=max(trans.inside) if trans.inside else math.nan,
        f_cal=plate.f_cal, sigma_Y=rr.packet.sigma_Y,
        warnings=[str(w.message) for w in caught],
        config_echo=rr.config.to_dict())


def report_record(rr, report, evolution, pots):
    """Flat, JSON-friendly summary of a run."""
    fps = report.focal_points
    f1 = report.f1
    p1 = next((p.peak_intensity for p in fps if p.order == 1), math.nan)
    rec = {
        "Tc": report.Tc,
        "Tc_plane_max": report.Tc_plane,
        "f_cal": report.f_cal,
        "f1": f1,
        "f1_over_fcal": f1 / report.f_cal,
        "sigma_F1": report.sigma_F1,
        "sigma_Y": report.sigma_Y,
        "sigma_F1_over_sigma_Y": report.sigma_F1 / report.sigma_Y,
        "focal_points": [{"order": p.order, "position": p.position,
                          "relative_intensity": p.peak_intensity / p1 if p1 > 0 else math.nan,
                          "arrival_T": p.arrival_T} for p in fps],
    }
    for j in (1, 2, 3):
        rec[f"eta_{j}"] = report.eta_of(j)
    rec.update({
        "lambda_dB_nm": rr.lambda_m * 1e9,
        "velocity": rr.velocity,
        "K0": rr.packet.K0,
        "W_g0": rr.plate.W_g0,
        "n_zones": rr.plate.n_zones,
        "dT": rr.dT,
        "T_max": rr.T_max,
        "steps": evolution.steps,
        "norm_final": float(evolution.norms[-1]),
        "sor_iterations": pots.electrostatics.iterations if pots.electrostatics else 0,
        "sor_residual": pots.electrostatics.residual if pots.electrostatics else 0.0,
        "warnings": list(report.warnings),
        "config": report.config_echo,
    })
    return rec


def run_single(cfg, out_dir=None, pad_fft=True):
    """Run the full pipeline for one configuration.

    When ``out_dir`` is given, writes ``report.txt``, ``report.json``,
    ``axial.csv``, ``norm.csv``, ``transmission.csv``, ``spot.csv`` and any
    requested snapshots there.  On failure a ``FAILED`` marker holding the
    traceback is written before re-raising.
    """
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    try:
        return _run(cfg, out_dir, pad_fft)
    except BaseException:
        if out_dir is not None:
            io.atomic_write(os.path.join(out_dir, "FAILED"), traceback.format_exc())
        raise


def _run(cfg, out_dir, pad_fft):
    rr = resolve(cfg)
    grid, s = rr.grid, cfg.solver
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pots = build_potentials(rr)
        psi0 = gaussian_packet(grid, rr.packet)
        A = absorber_mask(grid, rr.absorber, rr.dT)
        axial = AxialObserver(grid, rr.dT, every=s.axial_every)
        trans = TransmissionObserver(grid, A, x_plane=cfg.diagnostics.x_plane)
        interval = max(s.snapshot_interval, rr.T_max / MAX_FRAMES)
        frames = DensitySnapshots(grid, rr.dT, rr.plate.x_back, interval=interval)
        snaps = SnapshotObserver(rr.dT, cfg.output.snapshot_times)
        log.info("evolving %d steps of dT=%g", math.ceil(rr.T_max / rr.dT), rr.dT)
        ev = evolve(psi0, pots.total, A, rr.dT, rr.T_max, grid,
                    observers=(axial, trans, frames, snaps), norm_every=s.norm_every,
                    pad_fft=pad_fft and rr.absorber.band_cells > 0)
        report = _measure(rr, axial, trans, frames, cfg.diagnostics, caught)
    record = report_record(rr, report, ev, pots)
    if out_dir is not None:
        _write_outputs(out_dir, rr, record, ev, pots, axial, trans, frames, snaps, report)
    return RunResult(report, record, ev, pots, axial.profile, trans, snaps.snapshots, frames, rr)


def _write_outputs(out_dir, rr, record, ev, pots, axial, trans, frames, snaps, report):
    grid = rr.grid
    io.write_report(record, out_dir)
    io.export_profile(axial.profile.x_coords, axial.profile.intensity,
                      os.path.join(out_dir, "axial.csv"))
    io.export_profile(ev.times, ev.norms, os.path.join(out_dir, "norm.csv"), header=("T", "norm"))
    io.atomic_write(os.path.join(out_dir, "transmission.csv"),
                    io.csv_text(("T", "inside", "cumulative"),
                                zip(trans.times, trans.inside,
                                    trans.cumulative)))
    fp1 = [p for p in report.focal_points if p.order == 1]
    if fp1:
        _, frame = frames.nearest(fp1[0].arrival_T)
        rho = frames.embed(frame, grid)
        io.export_profile(grid.y, rho[grid.x_index(fp1[0].position)],
                          os.path.join(out_dir, "spot.csv"), header=("Y", "density"))
    for T, psi in sorted(snaps.snapshots.items()):
        io.export_field(psi, os.path.join(out_dir, f"psi_T{T:g}.grid"), dx=grid.dx)
    if rr.config.output.export_fields:
        io.export_field(pots.total, os.path.join(out_dir, "W_total.grid"), dx=grid.dx)
        io.export_field(pots.chi, os.path.join(out_dir, "chi.grid"), dx=grid.dx)


# ------------------------------------------------------------------ sweeps

def sweep_points(cfg):
    """``[(values_dict, point_config), ...]``; a config without sweep is one point."""
    if cfg.sweep is None:
        return [({}, cfg)]
    base = cfg.to_dict()
    base.pop("sweep", None)
    base_cfg = from_dict(base)
    return [(pt, base_cfg.with_values(**pt)) for pt in cfg.sweep.points()]


def sweep_header(cfg):
    params = [] if cfg.sweep is None else [cfg.sweep.parameter] + (
        [cfg.sweep.parameter2] if cfg.sweep.parameter2 else [])
    return tuple(params) + SWEEP_COLUMNS + ("error",)


def sweep_row(values, record=None, error=""):
    row = list(values.values())
    for col in SWEEP_COLUMNS:
        row.append(record[col] if record is not None else math.nan)
    row.append(error)
    return row


def _point(args):
    values, cfg, out_dir, pad_fft = args
    try:
        res = run_single(cfg, out_dir, pad_fft)
        return sweep_row(values, res.record)
    except Exception as exc:  # recorded in-row, sweep continues
        log.warning("sweep point %s failed: %s", values, exc)
        return sweep_row(values, error=f"{type(exc).__name__}: {exc}".replace("\n", " "))


def run_sweep(cfg, threads=None, out_dir=None, pad_fft=True):
    """Run every sweep point; returns ``(header, rows)`` and writes ``sweep.csv``."""
    points = sweep_points(cfg)
    jobs = []
    for k, (values, pcfg) in enumerate(points):
        pdir = os.path.join(out_dir, f"point_{k:03d}") if out_dir is not None else None
        jobs.append((values, pcfg, pdir, pad_fft))
    threads = threads or os.cpu_count() or 1
    if threads == 1 or len(jobs) == 1:
        rows = [_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            rows = list(pool.map(_point, jobs))
    header = sweep_header(cfg)
    if out_dir is not None:
        io.atomic_write(os.path.join(out_dir, "sweep.csv"), io.csv_text(header, rows))
    return header, rows
