"""Pure-NumPy stencil kernels.

Every kernel here performs the same IEEE operations in the same order as
its counterpart in ``_kernels.pyx``, so both backends produce
bit-identical arrays.  Inputs are C-contiguous float64 with a leading
component axis: ``(1, nx, ny, nz)`` for the scalar fed to ``grad``,
``(3, nx, ny, nz)`` for vectors, ``(7, ...)`` for the packed state.  A
spacing of ``0.0`` marks a degenerate axis (derivative identically zero).
"""

import numpy as np

FOURPI = 4.0 * np.pi


def _d(f, axis, h):
    if h == 0.0:
        return np.zeros_like(f)
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)


def grad(f, hx, hy, hz, out):
    f = f[0]
    out[0] = _d(f, 0, hx)
    out[1] = _d(f, 1, hy)
    out[2] = _d(f, 2, hz)
    return out


def div(v, hx, hy, hz, out):
    out[...] = (_d(v[0], 0, hx) + _d(v[1], 1, hy)) + _d(v[2], 2, hz)
    return out


def curl(v, hx, hy, hz, out):
    out[0] = _d(v[2], 1, hy) - _d(v[1], 2, hz)
    out[1] = _d(v[0], 2, hz) - _d(v[2], 0, hx)
    out[2] = _d(v[1], 0, hx) - _d(v[0], 1, hy)
    return out


def maxwell_rhs(y, rho, J, c, hx, hy, hz, out):
    """Fused right-hand side for the packed state ``y = [T, E(3), B(3)]``.

    dT/dt = c div E - 4 pi c rho
    dE/dt = c curl B - c grad T - 4 pi J
    dB/dt = -c curl E
    """
    T, E, B = y[0], y[1:4], y[4:7]
    divE = (_d(E[0], 0, hx) + _d(E[1], 1, hy)) + _d(E[2], 2, hz)
    out[0] = c * divE - (FOURPI * c) * rho
    gT = (_d(T, 0, hx), _d(T, 1, hy), _d(T, 2, hz))
    cB = (
        _d(B[2], 1, hy) - _d(B[1], 2, hz),
        _d(B[0], 2, hz) - _d(B[2], 0, hx),
        _d(B[1], 0, hx) - _d(B[0], 1, hy),
    )
    cE = (
        _d(E[2], 1, hy) - _d(E[1], 2, hz),
        _d(E[0], 2, hz) - _d(E[2], 0, hx),
        _d(E[1], 0, hx) - _d(E[0], 1, hy),
    )
    for a in range(3):
        out[1 + a] = (c * cB[a] - c * gT[a]) - FOURPI * J[a]
        out[4 + a] = -c * cE[a]
    return out


def set_num_threads(n):
    pass


def get_num_threads():
    return 1
