"""Kernel backend selection and FFT worker configuration.

The package ships a compiled extension (``uncertlab._kernels``, Cython)
for the hot elementwise/reduction kernels and a pure-numpy fallback with
the same API.  Selection happens once at import:

* ``ULAB_BACKEND=python``    force the numpy fallback
* ``ULAB_BACKEND=compiled``  require the extension (ImportError if absent)
* unset / ``auto``           compiled if available, else fallback

``ULAB_THREADS`` caps FFT parallelism (0 = auto, i.e. all cores).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py


def _load(choice: str) -> ModuleType:
    if choice == "python":
        return _kernels_py
    try:
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    except ImportError:
        if choice == "compiled":
            raise
        return _kernels_py


kernels: ModuleType = _load(os.environ.get("ULAB_BACKEND", "auto").lower())


def use(name: str) -> ModuleType:
    """Switch backends at runtime ('python' or 'compiled'); returns the module."""
    global kernels
    if name not in ("python", "compiled"):
        raise ValueError(f"unknown backend {name!r}")
    kernels = _load(name)
    return kernels


def backend_name() -> str:
    return kernels.NAME


def fft_workers() -> int:
    """Worker count for scipy.fft, from ULAB_THREADS (0 = auto)."""
    raw = os.environ.get("ULAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        return os.cpu_count() or 1
    return n
