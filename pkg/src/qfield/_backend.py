"""Kernel backend chosen at import time.

``QFIELD_BACKEND`` may be ``auto`` (default: compiled if importable),
``native`` (compiled, error if missing) or ``python`` (NumPy fallback).
"""

import os

from . import _fallback

_choice = os.environ.get("QFIELD_BACKEND", "auto").lower()
if _choice not in ("auto", "native", "python"):
    raise ImportError(f"QFIELD_BACKEND must be auto, native or python, not {_choice!r}")

try:
    from . import _kernels as _native
except ImportError:
    _native = None

if _choice == "native" and _native is None:
    raise ImportError("QFIELD_BACKEND=native but qfield._kernels is not built")

kernels = _fallback if (_choice == "python" or _native is None) else _native
name = "python" if kernels is _fallback else "native"


def native_available():
    return _native is not None


def get_kernels(backend=None):
    """Return the kernel module for ``backend`` (None means the active one)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _fallback
    if backend == "native":
        if _native is None:
            raise RuntimeError("compiled kernels are not available")
        return _native
    raise ValueError(f"unknown backend {backend!r}")


def set_num_threads(n):
    """Thread count for the compiled kernels (no-op for the fallback)."""
    if _native is not None:
        _native.set_num_threads(int(n))
