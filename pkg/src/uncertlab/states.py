"""Wavefunction states, the unitary position/momentum transform, and
state synthesis (gaussian packets and annular bumps).

Transform convention (hbar-scaled, unitary): position -> momentum is

    (F g)(p) = (2*pi*hbar)^(-3/2) * sum_x exp(-i p.x / hbar) g(x) dx^3

realized as a centered FFT: both lattices contain their origin (even n),
and ``ifftshift``/``fftshift`` supply the lattice-offset phases exactly,
so multiplication by x_j in position rep is the exact conjugate of the
spectral derivative i*hbar d/dp_j on the momentum lattice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft

from .backend import fft_workers, kernels
from .grids import GridSpec, mesh_p, mesh_x, radial_p

POSITION = "position"
MOMENTUM = "momentum"


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude field on a grid, tagged with its representation.

    Values are immutable; the amplitude array is marked read-only.  The
    conjugate representation is computed on demand and memoized (the cache
    is invisible to equality and semantics).
    """

    grid: GridSpec
    rep: str
    amp: np.ndarray

    def __post_init__(self) -> None:
        if self.rep not in (POSITION, MOMENTUM):
            raise ValueError(f"unknown representation {self.rep!r}")
        shape = (self.grid.n,) * 3
        if self.amp.shape != shape:
            raise ValueError(f"amplitude shape {self.amp.shape} != {shape}")
        if self.amp.dtype != np.complex128:
            object.__setattr__(self, "amp", self.amp.astype(np.complex128))
        self.amp.setflags(write=False)
        object.__setattr__(self, "_twin", None)

    # -- norms and arithmetic -------------------------------------------------

    def norm2(self) -> float:
        return kernels.wnorm2(self.amp) * self.grid.cell_volume(self.rep)

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def __add__(self, other: "WaveFunction") -> "WaveFunction":
        self._check_compatible(other)
        return WaveFunction(self.grid, self.rep, self.amp + other.amp)

    def __sub__(self, other: "WaveFunction") -> "WaveFunction":
        self._check_compatible(other)
        return WaveFunction(self.grid, self.rep, self.amp - other.amp)

    def __mul__(self, scalar: complex) -> "WaveFunction":
        return WaveFunction(self.grid, self.rep, self.amp * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other: "WaveFunction") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("states live on different grids")
        if self.rep != other.rep:
            raise ValueError("states are in different representations")

    # -- representation change ------------------------------------------------

    def to_rep(self, target: str) -> "WaveFunction":
        if target == self.rep:
            return self
        twin = object.__getattribute__(self, "_twin")
        if twin is None:
            twin = transform(self, target)
            object.__setattr__(self, "_twin", twin)
            object.__setattr__(twin, "_twin", self)
        return twin


def transform(f: WaveFunction, target: str) -> WaveFunction:
    """Unitary change of representation; identity when target == current."""
    if target not in (POSITION, MOMENTUM):
        raise ValueError(f"unknown representation {target!r}")
    if target == f.rep:
        return f
    g = f.grid
    w = fft_workers()
    if f.rep == POSITION:
        c = g.dx**3 * (2.0 * np.pi * g.hbar) ** -1.5
        out = scipy.fft.fftn(scipy.fft.ifftshift(f.amp), workers=w)
        amp = c * scipy.fft.fftshift(out)
    else:
        c = g.dp**3 * g.n**3 * (2.0 * np.pi * g.hbar) ** -1.5
        out = scipy.fft.ifftn(scipy.fft.ifftshift(f.amp), workers=w)
        amp = c * scipy.fft.fftshift(out)
    return WaveFunction(g, target, amp)


def inner_product(f: WaveFunction, g: WaveFunction) -> complex:
    """<f, g> = integral f * conj(g), linear in f; reps unified internally."""
    if f.grid != g.grid:
        raise GridMismatchError("states live on different grids")
    gg = g.to_rep(f.rep)
    return kernels.wdot(f.amp, gg.amp) * f.grid.cell_volume(f.rep)


# -- state synthesis -----------------------------------------------------------


@dataclass(frozen=True)
class StateSpec:
    """Parametric family of momentum-representation test states.

    gaussian:     amp(p) ~ exp(-|p - p0|^2 / (2 sigma^2))
    annular_bump: amp(p) ~ exp(-1/(1-u^2)),
                  u = (2|p| - r_in - r_out)/(r_out - r_in), zero outside,
                  optionally times a seeded smooth phase.
    """

    family: str
    p0: Optional[tuple[float, float, float]] = None
    sigma: Optional[float] = None
    r_in: Optional[float] = None
    r_out: Optional[float] = None
    seed: Optional[int] = None

    def label(self) -> str:
        if self.family == "gaussian":
            return f"gaussian(p0={list(self.p0)},sigma={self.sigma})"
        tail = f",seed={self.seed}" if self.seed is not None else ""
        return f"annular_bump(r_in={self.r_in},r_out={self.r_out}{tail})"

    def to_json(self) -> dict:
        if self.family == "gaussian":
            return {"family": "gaussian", "p0": list(self.p0), "sigma": self.sigma}
        d = {"family": "annular_bump", "r_in": self.r_in, "r_out": self.r_out}
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    @staticmethod
    def from_json(obj: dict | str) -> "StateSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        family = obj.get("family")
        if family == "gaussian":
            p0 = obj["p0"]
            if len(p0) != 3:
                raise ValueError("p0 must be a 3-vector")
            return StateSpec(family="gaussian", p0=tuple(float(v) for v in p0),
                             sigma=float(obj["sigma"]))
        if family == "annular_bump":
            return StateSpec(family="annular_bump", r_in=float(obj["r_in"]),
                             r_out=float(obj["r_out"]), seed=obj.get("seed"))
        raise ValueError(f"unknown state family {family!r}")


# probability mass allowed outside the lattice before synthesis refuses
SUPPORT_TOL = 1e-5


def synthesize_state(grid: GridSpec, spec: StateSpec) -> WaveFunction:
    """Build a unit-norm momentum-representation state from its spec."""
    if spec.family == "gaussian":
        amp = _gaussian_amp(grid, spec)
    elif spec.family == "annular_bump":
        amp = _annular_amp(grid, spec)
    else:
        raise ValueError(f"unknown state family {spec.family!r}")
    f = WaveFunction(grid, MOMENTUM, amp)
    n2 = f.norm2()
    if not np.isfinite(n2) or n2 <= 0:
        raise ValueError(f"state {spec.label()} has no mass on this grid")
    f = f * (1.0 / np.sqrt(n2))
    edge = _edge_mass(f.amp, grid.dp**3)
    if edge > SUPPORT_TOL:
        raise ValueError(
            f"state {spec.label()} puts mass {edge:.2e} at the momentum lattice "
            f"edge (limit {SUPPORT_TOL:g}); enlarge the grid or move the state"
        )
    return f


def _gaussian_amp(grid: GridSpec, spec: StateSpec) -> np.ndarray:
    p1, p2, p3 = mesh_p(grid)
    a, b, c = spec.p0
    s = spec.sigma
    if s <= 0:
        raise ValueError("sigma must be positive")
    d2 = (p1 - a) ** 2 + (p2 - b) ** 2 + (p3 - c) ** 2
    return np.exp(-d2 / (2.0 * s * s)).astype(np.complex128)


def _annular_amp(grid: GridSpec, spec: StateSpec) -> np.ndarray:
    r_in, r_out = spec.r_in, spec.r_out
    if not (0 <= r_in < r_out):
        raise ValueError("need 0 <= r_in < r_out")
    if r_out > grid.nyquist:
        raise ValueError(
            f"r_out={r_out} exceeds the Nyquist momentum {grid.nyquist:.4f}"
        )
    r = radial_p(grid)
    u = (2.0 * r - r_in - r_out) / (r_out - r_in)
    amp = np.zeros_like(r)
    inside = np.abs(u) < 1.0
    amp[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    amp = amp.astype(np.complex128)
    if spec.seed is not None:
        p1, p2, p3 = mesh_p(grid)
        rng = np.random.default_rng(spec.seed)
        lin = rng.uniform(-1.0, 1.0, 3)
        osc = rng.uniform(-0.5, 0.5, 3)
        freq = rng.uniform(0.3, 1.0, 3)
        phase = lin[0] * p1 + lin[1] * p2 + lin[2] * p3
        phase = phase + osc[0] * np.sin(freq[0] * p1)
        phase = phase + osc[1] * np.sin(freq[1] * p2)
        phase = phase + osc[2] * np.sin(freq[2] * p3)
        amp = amp * np.exp(1j * phase)
    return amp


# -- domain compliance ----------------------------------------------------------


@dataclass(frozen=True)
class ComplianceReport:
    """Numeric stand-in for membership in the smooth-away-from-zero domain."""

    mass_near_zero: float
    mass_at_edges: float
    tolerance: float
    compliant: bool


def _edge_mass(amp: np.ndarray, cell: float) -> float:
    """Probability mass in the outer 2-cell shell of the lattice."""
    n = amp.shape[0]
    w = np.abs(amp) ** 2 * cell
    mask = np.zeros(amp.shape, dtype=bool)
    for ax in range(3):
        sl = [slice(None)] * 3
        sl[ax] = slice(0, 2)
        mask[tuple(sl)] = True
        sl[ax] = slice(n - 2, n)
        mask[tuple(sl)] = True
    return float(w[mask].sum())


def domain_compliance(f: WaveFunction, p_min: float, edge_tol: float) -> ComplianceReport:
    """Report probability mass near p = 0 and at both lattice edges."""
    fp = f.to_rep(MOMENTUM)
    r = radial_p(f.grid)
    w = np.abs(fp.amp) ** 2 * f.grid.dp**3
    near = float(w[r < p_min].sum())
    edge_p = _edge_mass(fp.amp, f.grid.dp**3)
    fx = f.to_rep(POSITION)
    edge_x = _edge_mass(fx.amp, f.grid.dx**3)
    edges = max(edge_p, edge_x)
    return ComplianceReport(
        mass_near_zero=near,
        mass_at_edges=edges,
        tolerance=edge_tol,
        compliant=(near < edge_tol and edges < edge_tol),
    )
