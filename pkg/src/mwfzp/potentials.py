"""Regularised Casimir-van der Waals atom-surface potential and the total
static potential entering the Hamiltonian."""
from dataclasses import dataclass

import numpy as np

# Scaled magnitudes below this are stored as exact zeros.
FAR_FIELD_CUTOFF = 1e-12


@dataclass(frozen=True)
class CasimirParams:
    """He on Cr: ``C3`` in J m^3, ``l`` and ``Lambda`` in metres."""

    C3: float = 2.5e-50
    l: float = 9.3e-9
    Lambda: float = 10e-9

    def __post_init__(self):
        if not (self.C3 > 0 and self.l > 0 and self.Lambda > 0):
            raise ValueError("C3, l and Lambda must be positive")

    @property
    def C4(self):
        return self.C3 * self.l


def retarded_vdw_si(chi, params):
    """Unregularised long-range form ``-C4 / ((chi + l) chi^3)`` in joules.

    Behaves as ``-C3 / chi^3`` for ``chi << l`` and ``-C4 / chi^4`` for
    ``chi >> l``.
    """
    chi = np.asarray(chi, dtype=np.float64)
    return -params.C4 / ((chi + params.l) * chi ** 3)


def casimir_vdw_si(chi, params):
    """Atom-surface energy in joules at distance ``chi`` (metres).

    Beyond ``Lambda`` the retarded form ``-C4 / ((chi + l) chi^3)`` is used;
    below it a parabola with its vertex at the surface, matched in value
    and slope at ``Lambda``.
    """
    chi = np.asarray(chi, dtype=np.float64)
    if np.any(chi < 0):
        raise ValueError("distance must be non-negative")
    C4, l, L = params.C4, params.l, params.Lambda
    out = np.empty_like(chi)
    far = chi > L
    out[far] = retarded_vdw_si(chi[far], params)
    c = chi[~far]
    out[~far] = C4 / (2 * L ** 5 * (L + l) ** 2) * ((4 * L + 3 * l) * c ** 2 - (6 * L + 5 * l) * L ** 2)
    return out


def casimir_surface_value(params):
    """Value of the regularised potential on the surface (joules)."""
    C4, l, L = params.C4, params.l, params.Lambda
    return -C4 * (6 * L + 5 * l) / (2 * L ** 3 * (L + l) ** 2)


def casimir_vdw(chi, params, scaling):
    """Scaled Casimir-van der Waals field from a scaled distance field."""
    chi = np.asarray(chi, dtype=np.float64)
    if np.any(chi < 0):
        raise ValueError("distance must be non-negative")
    W = casimir_vdw_si(chi * scaling.beta, params) / scaling.V0
    W[np.abs(W) < FAR_FIELD_CUTOFF] = 0.0
    return W


def total_potential(geometric, casimir, induced):
    geometric = np.asarray(geometric, dtype=np.float64)
    for name, f in (("casimir", casimir), ("induced", induced)):
        if np.shape(f) != geometric.shape:
            raise ValueError(f"{name} field shape {np.shape(f)} != {geometric.shape}")
    return geometric + casimir + induced
