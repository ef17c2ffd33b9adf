"""Uniform 2D grid shared by every field in a run.

Fields are plain ``numpy`` arrays of shape ``(nx, ny)``; axis 0 is X (the
propagation direction) and axis 1 is Y (transverse).
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    dx: float
    dy: float
    x0: float  # coordinate of cell index 0 along X
    y0: float

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ValueError("grid needs at least 16 cells per axis")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacing must be positive")
        if not np.isclose(self.dx, self.dy, rtol=1e-12, atol=0.0):
            raise ValueError("cells must be square (dx == dy)")

    @classmethod
    def centered(cls, nx, ny, dx, x_center=0.0, y_center=0.0):
        """Grid whose cell centres are symmetric about (x_center, y_center)."""
        return cls(nx, ny, dx, dx,
                   x_center - 0.5 * (nx - 1) * dx,
                   y_center - 0.5 * (ny - 1) * dx)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def cell_area(self):
        return self.dx * self.dy

    @property
    def x(self):
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def y(self):
        return self.y0 + self.dy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def x_index(self, x):
        """Index of the cell whose centre is nearest to ``x``."""
        return int(np.clip(np.rint((x - self.x0) / self.dx), 0, self.nx - 1))

    def y_index(self, y):
        return int(np.clip(np.rint((y - self.y0) / self.dy), 0, self.ny - 1))

    def check_field(self, field, name="field"):
        if np.shape(field) != self.shape:
            raise ValueError(f"{name} has shape {np.shape(field)}, grid is {self.shape}")
