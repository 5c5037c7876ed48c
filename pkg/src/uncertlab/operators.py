"""Composable spectral operator pipelines over wavefunctions.

Expression leaves are diagonal multipliers in one representation
(DiagMomentum / DiagPosition) plus scalar multiples of the identity;
Sum and Compose combine them.  The interpreter inserts transforms at
every representation boundary and returns results in the input's
representation.

Operator builders cover the lab's working set: position x_j, momentum
p_j, radial powers |p|^s (with the p = 0 lattice value of singular
symbols guarded to 0), the time components t*p_j/|p|, the symmetrized
energy components (1/4t)(|p| x_j + x_j |p|) kept in structural form,
and the free Hamiltonian |p|^2 / 2m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .backend import kernels
from .grids import GridSpec, cached_symbol, mesh_p, mesh_x, radial_p
from .states import MOMENTUM, POSITION, WaveFunction

SymbolFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DiagMomentum:
    """Pointwise multiplier in momentum representation."""

    symbol: SymbolFn
    key: Optional[tuple] = None


@dataclass(frozen=True)
class DiagPosition:
    """Pointwise multiplier in position representation."""

    symbol: SymbolFn
    key: Optional[tuple] = None


@dataclass(frozen=True)
class Scale:
    """Scalar multiple of the identity."""

    value: complex


@dataclass(frozen=True)
class OpSum:
    parts: tuple


@dataclass(frozen=True)
class Compose:
    """Ordered composition; the rightmost factor is applied first."""

    parts: tuple


OperatorExpr = Union[DiagMomentum, DiagPosition, Scale, OpSum, Compose]


def op_sum(*parts: OperatorExpr) -> OpSum:
    return OpSum(tuple(parts))


def compose(*parts: OperatorExpr) -> Compose:
    return Compose(tuple(parts))


# -- operator kinds -------------------------------------------------------------


def _check_axis(j: int) -> None:
    if j not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {j}")


@dataclass(frozen=True)
class Position:
    j: int

    def __post_init__(self) -> None:
        _check_axis(self.j)


@dataclass(frozen=True)
class Momentum:
    j: int

    def __post_init__(self) -> None:
        _check_axis(self.j)


@dataclass(frozen=True)
class AbsPPow:
    """|p|^s for integer s; negative s is singular at p = 0 (guarded)."""

    s: int


@dataclass(frozen=True)
class Time:
    j: int
    t: float

    def __post_init__(self) -> None:
        _check_axis(self.j)
        if self.t == 0:
            raise ValueError("time parameter must be nonzero")


@dataclass(frozen=True)
class Energy:
    j: int
    t: float

    def __post_init__(self) -> None:
        _check_axis(self.j)
        if self.t == 0:
            raise ValueError("time parameter must be nonzero")


@dataclass(frozen=True)
class FreeHamiltonian:
    m: float

    def __post_init__(self) -> None:
        if self.m <= 0:
            raise ValueError(f"mass must be positive, got {self.m}")


OpKind = Union[Position, Momentum, AbsPPow, Time, Energy, FreeHamiltonian]


def _radial_pow_symbol(grid: GridSpec, s: int) -> np.ndarray:
    r = radial_p(grid)
    if s == 0:
        return np.ones_like(r)
    if s > 0:
        return r**s
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = r[nz] ** float(s)
    return out  # p = 0 lattice value guarded to 0


def _time_symbol(grid: GridSpec, j: int, t: float) -> np.ndarray:
    pj = mesh_p(grid)[j - 1]
    rinv = _radial_pow_symbol(grid, -1)
    return t * pj * rinv


def absppow_symbol(grid: GridSpec, s: int) -> np.ndarray:
    """Cached |p|^s symbol array with the guarded origin."""
    return cached_symbol(grid, ("absp", s), lambda g: _radial_pow_symbol(g, s))


def build(kind: OpKind) -> OperatorExpr:
    """Lower an operator kind to its expression tree."""
    if isinstance(kind, Position):
        j = kind.j
        return DiagPosition(lambda x1, x2, x3, _j=j: (x1, x2, x3)[_j - 1], key=("x", j))
    if isinstance(kind, Momentum):
        j = kind.j
        return DiagMomentum(lambda p1, p2, p3, _j=j: (p1, p2, p3)[_j - 1], key=("p", j))
    if isinstance(kind, AbsPPow):
        s = int(kind.s)
        return DiagMomentum(
            lambda p1, p2, p3, _s=s: _symbol_from_mesh(p1, p2, p3, _s),
            key=("absp", s),
        )
    if isinstance(kind, Time):
        j, t = kind.j, kind.t
        return DiagMomentum(
            lambda p1, p2, p3, _j=j, _t=t: _time_from_mesh(p1, p2, p3, _j, _t),
            key=("time", j, t),
        )
    if isinstance(kind, Energy):
        # symmetrized composition (1/4t)(|p| x_j + x_j |p|), kept structural
        j, t = kind.j, kind.t
        absp = build(AbsPPow(1))
        xj = build(Position(j))
        return compose(
            Scale(1.0 / (4.0 * t)),
            op_sum(compose(absp, xj), compose(xj, absp)),
        )
    if isinstance(kind, FreeHamiltonian):
        m = kind.m
        return DiagMomentum(
            lambda p1, p2, p3, _m=m: (p1**2 + p2**2 + p3**2) / (2.0 * _m),
            key=("freeH", m),
        )
    raise TypeError(f"not an operator kind: {kind!r}")


def _symbol_from_mesh(p1, p2, p3, s: int) -> np.ndarray:
    r = np.sqrt(p1**2 + p2**2 + p3**2)
    if s == 0:
        return np.ones_like(r)
    if s > 0:
        return r**s
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = r[nz] ** float(s)
    return out


def _time_from_mesh(p1, p2, p3, j: int, t: float) -> np.ndarray:
    r = np.sqrt(p1**2 + p2**2 + p3**2)
    out = np.zeros_like(r)
    nz = r > 0
    pj = (p1, p2, p3)[j - 1]
    out[nz] = t * pj[nz] / r[nz]
    return out


# -- interpreter -----------------------------------------------------------------


def _leaf_array(leaf: DiagMomentum | DiagPosition, grid: GridSpec) -> np.ndarray:
    mesh = mesh_p(grid) if isinstance(leaf, DiagMomentum) else mesh_x(grid)
    if leaf.key is not None:
        return cached_symbol(grid, leaf.key, lambda g, _l=leaf, _m=mesh: np.asarray(_l.symbol(*_m)))
    return np.asarray(leaf.symbol(*mesh))


def _apply(expr: OperatorExpr, f: WaveFunction) -> WaveFunction:
    if isinstance(expr, DiagMomentum):
        g = f.to_rep(MOMENTUM)
        return WaveFunction(g.grid, MOMENTUM, kernels.mul(_leaf_array(expr, g.grid), g.amp))
    if isinstance(expr, DiagPosition):
        g = f.to_rep(POSITION)
        return WaveFunction(g.grid, POSITION, kernels.mul(_leaf_array(expr, g.grid), g.amp))
    if isinstance(expr, Scale):
        return f * expr.value
    if isinstance(expr, Compose):
        out = f
        for part in reversed(expr.parts):
            out = _apply(part, out)
        return out
    if isinstance(expr, OpSum):
        if not expr.parts:
            raise ValueError("empty operator sum")
        terms = [_apply(part, f) for part in expr.parts]
        rep = terms[0].rep
        acc = np.array(terms[0].amp, copy=True)
        for term in terms[1:]:
            kernels.scale_add(acc, 1.0, term.to_rep(rep).amp)
        return WaveFunction(f.grid, rep, acc)
    raise TypeError(f"not an operator expression: {expr!r}")


def apply(expr: OperatorExpr, f: WaveFunction) -> WaveFunction:
    """Apply a pipeline to a state; result is in the input's representation."""
    return _apply(expr, f).to_rep(f.rep)


def commutator_apply(a: OperatorExpr, b: OperatorExpr, f: WaveFunction) -> WaveFunction:
    """[A, B] f = A(B f) - B(A f)."""
    return apply(a, apply(b, f)) - apply(b, apply(a, f))
