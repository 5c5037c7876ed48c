"""Exact noncommutative algebra over x_j, p_j and R = |p|.

Words are kept in the normal order x^alpha p^beta R^s (x factors leftmost;
x's commute among themselves, p's commute among themselves and with R).
Products are normal-ordered with exactly two rewrite rules, applied to
fixpoint:

    (R1)  p_j x_k = x_k p_j - i*hbar * delta_jk
    (R2)  R^s x_k = x_k R^s - i*hbar * s * p_k R^(s-2)

both of which are the single derivation rule "commuting x_k to the left
differentiates the (p, R) tail by i*hbar d/dp_k".  Coefficients are exact
Gaussian rationals carrying integer powers of hbar (>= 0) and t; no
floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

Exp3 = tuple[int, int, int]
# monomial identity: (hbar_pow, t_pow, x_exp, p_exp, r_pow)
Key = tuple[int, int, Exp3, Exp3, int]

_ZERO3: Exp3 = (0, 0, 0)


@dataclass(frozen=True)
class Coefficient:
    """Exact scalar: (re + i*im) * hbar^hbar_pow * t^t_pow."""

    re: Fraction = Fraction(1)
    im: Fraction = Fraction(0)
    hbar_pow: int = 0
    t_pow: int = 0

    def __post_init__(self) -> None:
        if self.hbar_pow < 0:
            raise ValueError("hbar_pow must be nonnegative")

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        return Coefficient(
            re=self.re * other.re - self.im * other.im,
            im=self.re * other.im + self.im * other.re,
            hbar_pow=self.hbar_pow + other.hbar_pow,
            t_pow=self.t_pow + other.t_pow,
        )

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


@dataclass(frozen=True)
class NCMonomial:
    """coeff * x^x_exp p^p_exp R^r_pow in normal order."""

    coeff: Coefficient
    x_exp: Exp3 = _ZERO3
    p_exp: Exp3 = _ZERO3
    r_pow: int = 0

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.x_exp) or any(e < 0 for e in self.p_exp):
            raise ValueError("x and p exponents must be nonnegative")

    def key(self) -> Key:
        return (self.coeff.hbar_pow, self.coeff.t_pow, self.x_exp, self.p_exp, self.r_pow)


def _bump(exp: Exp3, axis: int, delta: int) -> Exp3:
    out = list(exp)
    out[axis] += delta
    return tuple(out)


class NCPoly:
    """Canonical sum of normal-ordered monomials with exact coefficients.

    Internally a map from monomial identity to a Gaussian-rational value;
    zero terms are dropped, so equality is structural equality of the maps.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Key, tuple[Fraction, Fraction]] | None = None):
        self._terms: dict[Key, tuple[Fraction, Fraction]] = {}
        if terms:
            for k, (re, im) in terms.items():
                if re != 0 or im != 0:
                    self._terms[k] = (re, im)

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero() -> "NCPoly":
        return NCPoly()

    @staticmethod
    def from_monomial(m: NCMonomial) -> "NCPoly":
        if m.coeff.is_zero():
            return NCPoly()
        return NCPoly({m.key(): (m.coeff.re, m.coeff.im)})

    @staticmethod
    def scalar(re=1, im=0, hbar_pow: int = 0, t_pow: int = 0) -> "NCPoly":
        c = Coefficient(Fraction(re), Fraction(im), hbar_pow, t_pow)
        return NCPoly.from_monomial(NCMonomial(c))

    @staticmethod
    def x(j: int) -> "NCPoly":
        _check_axis(j)
        return NCPoly.from_monomial(NCMonomial(Coefficient(), x_exp=_bump(_ZERO3, j - 1, 1)))

    @staticmethod
    def p(j: int) -> "NCPoly":
        _check_axis(j)
        return NCPoly.from_monomial(NCMonomial(Coefficient(), p_exp=_bump(_ZERO3, j - 1, 1)))

    @staticmethod
    def r(s: int = 1) -> "NCPoly":
        return NCPoly.from_monomial(NCMonomial(Coefficient(), r_pow=s))

    # -- structure -------------------------------------------------------------

    def monomials(self) -> list[NCMonomial]:
        """Terms in the canonical order: descending lex on
        (x_exp, p_exp, r_pow, hbar_pow, t_pow)."""
        out = []
        for (h, t, xe, pe, r), (re, im) in self._terms.items():
            out.append(NCMonomial(Coefficient(re, im, h, t), xe, pe, r))
        out.sort(key=lambda m: (m.x_exp, m.p_exp, m.r_pow, m.coeff.hbar_pow, m.coeff.t_pow),
                 reverse=True)
        return out

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        from .dsl import render_poly

        return f"NCPoly({render_poly(self)})"

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self._terms)
        for k, (re, im) in other._terms.items():
            r0, i0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (r0 + re, i0 + im)
        return NCPoly(out)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self._terms)
        for k, (re, im) in other._terms.items():
            r0, i0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (r0 - re, i0 - im)
        return NCPoly(out)

    def __neg__(self) -> "NCPoly":
        return NCPoly({k: (-re, -im) for k, (re, im) in self._terms.items()})

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        return nc_mul(self, other)


def _check_axis(j: int) -> None:
    if j not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {j}")


def _cadd(acc: dict, key, re: Fraction, im: Fraction) -> None:
    r0, i0 = acc.get(key, (Fraction(0), Fraction(0)))
    acc[key] = (r0 + re, i0 + im)


def _mul_keys(k1: Key, v1, k2: Key, v2, acc: dict[Key, tuple[Fraction, Fraction]]) -> None:
    """Accumulate the normal-ordered product of two monomials into acc.

    Moving each x factor of the right monomial through the left tail
    p^beta R^s applies the derivation rule once per factor; every pass
    keeps one extracted-x branch and up to two correction branches that
    carry an extra -i*hbar.
    """
    h1, t1, x1, p1, r1 = k1
    h2, t2, x2, p2, r2 = k2
    # work terms: (extra_hbar, collected_x, p_exp, r_pow) -> gaussian rational
    work: dict[tuple[int, Exp3, Exp3, int], tuple[Fraction, Fraction]] = {
        (0, _ZERO3, p1, r1): (Fraction(1), Fraction(0))
    }
    for axis in range(3):
        for _ in range(x2[axis]):
            nxt: dict[tuple[int, Exp3, Exp3, int], tuple[Fraction, Fraction]] = {}
            for (eh, xa, pe, rp), (re, im) in work.items():
                _cadd(nxt, (eh, _bump(xa, axis, 1), pe, rp), re, im)
                if pe[axis] > 0:
                    # * (-i*hbar) * beta_axis
                    f = Fraction(pe[axis])
                    _cadd(nxt, (eh + 1, xa, _bump(pe, axis, -1), rp), im * f, -re * f)
                if rp != 0:
                    f = Fraction(rp)
                    _cadd(nxt, (eh + 1, xa, _bump(pe, axis, 1), rp - 2), im * f, -re * f)
            work = nxt
    cr = v1[0] * v2[0] - v1[1] * v2[1]
    ci = v1[0] * v2[1] + v1[1] * v2[0]
    for (eh, xa, pe, rp), (re, im) in work.items():
        kre = re * cr - im * ci
        kim = re * ci + im * cr
        xe = (x1[0] + xa[0], x1[1] + xa[1], x1[2] + xa[2])
        pp = (pe[0] + p2[0], pe[1] + p2[1], pe[2] + p2[2])
        _cadd(acc, (h1 + h2 + eh, t1 + t2, xe, pp, rp + r2), kre, kim)


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    """Normal-ordered product; associative and distributive (total function)."""
    acc: dict[Key, tuple[Fraction, Fraction]] = {}
    for k1, v1 in a._terms.items():
        for k2, v2 in b._terms.items():
            _mul_keys(k1, v1, k2, v2, acc)
    return NCPoly(acc)


def commutator(a: NCPoly, b: NCPoly) -> NCPoly:
    """[a, b] = ab - ba, canonicalized."""
    return nc_mul(a, b) - nc_mul(b, a)


def build_paper_ops(j: int) -> tuple[NCPoly, NCPoly]:
    """The time and energy components for axis j with symbolic t.

    time_j   = t * p_j * R^-1
    energy_j = (1/4) * t^-1 * (R x_j + x_j R), normal-ordered.
    """
    _check_axis(j)
    tj = NCPoly.from_monomial(
        NCMonomial(Coefficient(t_pow=1), p_exp=_bump(_ZERO3, j - 1, 1), r_pow=-1)
    )
    quarter_over_t = NCPoly.scalar(Fraction(1, 4), 0, t_pow=-1)
    sym = nc_mul(NCPoly.r(1), NCPoly.x(j)) + nc_mul(NCPoly.x(j), NCPoly.r(1))
    ej = nc_mul(quarter_over_t, sym)
    return tj, ej


def sum_over_axes(template: Callable[[int], NCPoly]) -> NCPoly:
    """Sum the axis instances, then merge isotropic triples to fixpoint.

    Three terms identical except for p_exp raised by +2 on axis 1, 2, 3
    respectively collapse to one term with the base p_exp and r_pow + 2
    (the represented-algebra identity p1^2 + p2^2 + p3^2 = R^2).  The
    rule lives only here, never inside nc_mul, so free normal forms stay
    unique.
    """
    total = NCPoly.zero()
    for j in (1, 2, 3):
        total = total + template(j)
    terms = dict(total._terms)
    merged = True
    while merged:
        merged = False
        for key in sorted(terms):
            h, t, xe, pe, rp = key
            if pe[0] < 2:
                continue
            base = _bump(pe, 0, -2)
            k1 = key
            k2 = (h, t, xe, _bump(base, 1, 2), rp)
            k3 = (h, t, xe, _bump(base, 2, 2), rp)
            if k2 in terms and k3 in terms and terms[k1] == terms[k2] == terms[k3]:
                val = terms[k1]
                del terms[k1], terms[k2], terms[k3]
                _cadd(terms, (h, t, xe, base, rp + 2), *val)
                if terms.get((h, t, xe, base, rp + 2)) == (0, 0):
                    del terms[(h, t, xe, base, rp + 2)]
                merged = True
                break
    return NCPoly(terms)


def hbar_over_i() -> NCPoly:
    """The scalar hbar/i = -i*hbar."""
    return NCPoly.scalar(0, -1, hbar_pow=1)
