"""Pure-numpy fallback for the hot array kernels.

Mirrors the API of the compiled extension ``uncertlab._kernels``; the
backend module picks whichever is importable.  All fields are complex128
arrays of identical shape; symbols may be float64 or complex128.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def wnorm2(f: np.ndarray) -> float:
    """Unweighted squared l2 norm, sum |f|^2."""
    a = f.ravel()
    return float(np.real(np.vdot(a, a)))


def wdot(f: np.ndarray, g: np.ndarray) -> complex:
    """Unweighted sesquilinear sum f * conj(g), linear in the first slot."""
    return complex(np.vdot(g.ravel(), f.ravel()))


def mul(sym: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Pointwise symbol application sym * f."""
    return np.multiply(sym, f)


def scale_add(acc: np.ndarray, alpha: complex, x: np.ndarray) -> None:
    """In-place acc += alpha * x."""
    if alpha == 1.0:
        acc += x
    else:
        acc += alpha * x


def free_phase(p2: np.ndarray, c: float, f: np.ndarray) -> np.ndarray:
    """exp(i*c*p2) * f for real phase coefficient c."""
    return np.exp(1j * c * p2) * f


def dev_norm2(af: np.ndarray, mean: float, f: np.ndarray) -> float:
    """sum |af - mean*f|^2, the deviation norm behind the variances."""
    d = af - mean * f
    a = d.ravel()
    return float(np.real(np.vdot(a, a)))
