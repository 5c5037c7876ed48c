"""Cubic grid discretization of R^3 and its position/momentum lattices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Discretization of R^3: n points per axis, position box length, hbar.

    Lattices (per axis, n even):
        x_k = -L/2 + k*dx,        dx = L/n
        p_k = (k - n/2)*dp,       dp = 2*pi*hbar/L
    so that dx*dp*n == 2*pi*hbar exactly and p = 0 is a lattice point.
    """

    n: int
    box_length: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if self.n % 2 != 0:
            raise ValueError(f"n must be even, got {self.n}")
        if self.n < 8:
            raise ValueError(f"n must be >= 8, got {self.n}")
        if self.box_length <= 0:
            raise ValueError("box_length must be positive")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / self.box_length

    @property
    def nyquist(self) -> float:
        """Largest momentum magnitude representable per axis, (n/2)*dp."""
        return (self.n // 2) * self.dp

    def axis_x(self) -> np.ndarray:
        return -self.box_length / 2.0 + self.dx * np.arange(self.n)

    def axis_p(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dp

    def cell_volume(self, rep: str) -> float:
        if rep == "position":
            return self.dx**3
        if rep == "momentum":
            return self.dp**3
        raise ValueError(f"unknown representation {rep!r}")


def build_grid(n: int, box_length: float, hbar: float = 1.0) -> GridSpec:
    """Validated GridSpec constructor."""
    return GridSpec(n=int(n), box_length=float(box_length), hbar=float(hbar))


@lru_cache(maxsize=16)
def mesh_x(grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Position meshgrids (X1, X2, X3), ij-indexed, read-only."""
    m = np.meshgrid(grid.axis_x(), grid.axis_x(), grid.axis_x(), indexing="ij")
    for a in m:
        a.setflags(write=False)
    return tuple(m)


@lru_cache(maxsize=16)
def mesh_p(grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Momentum meshgrids (P1, P2, P3), ij-indexed, read-only."""
    m = np.meshgrid(grid.axis_p(), grid.axis_p(), grid.axis_p(), indexing="ij")
    for a in m:
        a.setflags(write=False)
    return tuple(m)


@lru_cache(maxsize=16)
def radial_p(grid: GridSpec) -> np.ndarray:
    """|p| on the momentum lattice."""
    p1, p2, p3 = mesh_p(grid)
    r = np.sqrt(p1**2 + p2**2 + p3**2)
    r.setflags(write=False)
    return r


# pointwise symbol arrays for keyed operator leaves, cached per (grid, key)
_SYMBOL_CACHE: dict = {}


def cached_symbol(grid: GridSpec, key: tuple, build) -> np.ndarray:
    arr = _SYMBOL_CACHE.get((grid, key))
    if arr is None:
        arr = build(grid)
        arr.setflags(write=False)
        if len(_SYMBOL_CACHE) > 256:
            _SYMBOL_CACHE.clear()
        _SYMBOL_CACHE[(grid, key)] = arr
    return arr
