"""Free-particle propagation and the asymptotic velocity/energy checks.

The propagator multiplies momentum amplitudes by exp(-i t |p|^2 / (2 m hbar))
and is exactly unitary.  The closed-form velocity oracle

    || (x_j/t - p_j/m) psi_t || = || x_j psi_0 || / |t|

is an identity of the continuum free evolution; on a periodic grid it holds
to spectral accuracy only while the ballistically moving packet stays inside
the position box.  Once the excursion v*t approaches half the box length the
box coordinate wraps and both residuals saturate; see the README's accuracy
notes.  The energy check compares sum_j e_j^2 against H^2 in relative norm,
with e_j's internal time equal to the propagation time.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .backend import kernels
from .grids import radial_p
from .operators import (
    Energy,
    FreeHamiltonian,
    Momentum,
    Position,
    Scale,
    apply,
    build,
    compose,
)
from .states import MOMENTUM, WaveFunction


@dataclass(frozen=True)
class AsymptoticsRow:
    t: float
    velocity_residual: tuple[float, float, float]
    closed_form_velocity: tuple[float, float, float]
    energy_sq_residual: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[AsymptoticsRow, ...]
    slope: Optional[float]  # log-log slope of energy_sq_residual vs |t|

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,vres_1,vres_2,vres_3,closed_form_1,closed_form_2,closed_form_3,eres\n")
        for r in self.rows:
            v = r.velocity_residual
            c = r.closed_form_velocity
            buf.write(f"{r.t!r},{v[0]!r},{v[1]!r},{v[2]!r},{c[0]!r},{c[1]!r},{c[2]!r},"
                      f"{r.energy_sq_residual!r}\n")
        return buf.getvalue()


def propagate_free(f: WaveFunction, t: float, m: float) -> WaveFunction:
    """exp(-i t H / hbar) f for the free Hamiltonian H = |p|^2 / 2m."""
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    g = f.to_rep(MOMENTUM)
    if t == 0:
        return g.to_rep(f.rep)
    p2 = radial_p(g.grid) ** 2
    c = -t / (2.0 * m * g.grid.hbar)
    out = WaveFunction(g.grid, MOMENTUM, kernels.free_phase(p2, c, g.amp))
    return out.to_rep(f.rep)


def velocity_residual(j: int, f: WaveFunction, t: float, m: float) -> float:
    """|| (x_j/t - p_j/m) psi_t ||."""
    if t == 0:
        raise ValueError("time parameter must be nonzero")
    psi_t = propagate_free(f, t, m).to_rep(MOMENTUM)
    xterm = apply(compose(Scale(1.0 / t), build(Position(j))), psi_t)
    pterm = apply(compose(Scale(1.0 / m), build(Momentum(j))), psi_t)
    return (xterm - pterm).norm()


def closed_form_velocity(j: int, f: WaveFunction, t: float) -> float:
    """|| x_j psi_0 || / |t|, the continuum value of the velocity residual."""
    if t == 0:
        raise ValueError("time parameter must be nonzero")
    return apply(build(Position(j)), f).norm() / abs(t)


def energy_sq_residual(f: WaveFunction, t: float, m: float) -> float:
    """|| (sum_j e_j^2 - H^2) psi_t || / || H^2 psi_t ||, e_j at time t."""
    if t == 0:
        raise ValueError("time parameter must be nonzero")
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    psi_t = propagate_free(f, t, m).to_rep(MOMENTUM)
    acc = np.zeros_like(psi_t.amp)
    for j in (1, 2, 3):
        ej = build(Energy(j, t))
        ejj = apply(ej, apply(ej, psi_t))
        kernels.scale_add(acc, 1.0, ejj.amp)
    h = build(FreeHamiltonian(m))
    h2 = apply(h, apply(h, psi_t))
    vol = psi_t.grid.dp**3
    num = np.sqrt(kernels.wnorm2(acc - h2.amp) * vol)
    den = h2.norm()
    if den == 0:
        raise ValueError("H^2 annihilates the state; residual undefined")
    return float(num / den)


def energy_sq_expectation(f: WaveFunction, t: float, m: float) -> float:
    """<sum_j e_j^2 psi_t, psi_t> with e_j's time equal to the propagation time."""
    psi_t = propagate_free(f, t, m).to_rep(MOMENTUM)
    acc = np.zeros_like(psi_t.amp)
    for j in (1, 2, 3):
        ej = build(Energy(j, t))
        ejj = apply(ej, apply(ej, psi_t))
        kernels.scale_add(acc, 1.0, ejj.amp)
    vol = psi_t.grid.dp**3
    return float((kernels.wdot(acc, psi_t.amp) * vol).real)


def asymptotic_scan(f: WaveFunction, t_list: Sequence[float], m: float) -> ScanResult:
    """One row per t plus the least-squares log-log slope of the energy residual."""
    ts = list(t_list)
    if not ts:
        raise ValueError("t_list must be nonempty")
    if any(t == 0 for t in ts):
        raise ValueError("time parameter must be nonzero")
    signs = {t > 0 for t in ts}
    if len(signs) != 1:
        raise ValueError("t_list entries must share a sign")
    mags = [abs(t) for t in ts]
    if any(b <= a for a, b in zip(mags, mags[1:])):
        raise ValueError("t_list must be strictly increasing in magnitude")

    rows = []
    for t in ts:
        vres = tuple(velocity_residual(j, f, t, m) for j in (1, 2, 3))
        closed = tuple(closed_form_velocity(j, f, t) for j in (1, 2, 3))
        eres = energy_sq_residual(f, t, m)
        rows.append(AsymptoticsRow(t=t, velocity_residual=vres,
                                   closed_form_velocity=closed, energy_sq_residual=eres))
    slope = None
    if len(rows) >= 2:
        x = np.log([abs(r.t) for r in rows])
        y = np.log([r.energy_sq_residual for r in rows])
        slope = float(np.polyfit(x, y, 1)[0])
    return ScanResult(rows=tuple(rows), slope=slope)
