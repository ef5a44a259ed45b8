"""Uniform periodic grids and centered-difference vector calculus.

Fields are plain float64 arrays.  A scalar field has shape ``(nx, ny, nz)``
and a vector field ``(3, nx, ny, nz)``; extra leading axes (time windows,
batches) are allowed and mapped over.  Arrays are indexed ``[i, j, k]``
in memory; the x-fastest ordering required on disk is produced by the
snapshot writer.

All operators are built from the single stencil ``(f[i+1] - f[i-1]) / 2h``
with periodic wrap, so discrete ``curl(grad)`` and ``div(curl)`` vanish up
to rounding, and ``laplacian`` is ``div(grad)`` rather than a compact
seven-point stencil.  Axes with one cell are degenerate: their
derivatives are exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend

__all__ = [
    "Grid",
    "GridError",
    "grad",
    "div",
    "curl",
    "laplacian",
    "integrate",
    "l2_norm",
    "convergence_order",
]


class GridError(ValueError):
    """Invalid grid, or a field that does not live on the given grid."""


@dataclass(frozen=True)
class Grid:
    """Periodic box of ``nx * ny * nz`` cells of size ``dx * dy * dz``.

    Active axes need at least 4 cells; an axis with a single cell is
    degenerate (1-D and 2-D problems are ``n x 1 x 1`` and ``n x m x 1``).
    """

    nx: int
    ny: int = 1
    nz: int = 1
    dx: float = 1.0
    dy: float = 1.0
    dz: float = 1.0

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise GridError(f"{name} must be an integer, got {n!r}")
            if n != 1 and n < 4:
                raise GridError(f"{name}={n}: centered stencils need at least 4 cells (or 1 for a degenerate axis)")
        for name in ("dx", "dy", "dz"):
            h = getattr(self, name)
            if not (math.isfinite(h) and h > 0):
                raise GridError(f"{name} must be positive and finite, got {h!r}")
        if self.nx == 1:
            raise GridError("nx must be an active axis (>= 4 cells)")

    @classmethod
    def cube(cls, n: int, length: float = 1.0, dims: int = 3) -> Grid:
        """``n`` cells per active axis over a box of side ``length``.

        Degenerate axes get one cell spanning the whole side, so the box
        volume is ``length**3`` whatever ``dims`` is.
        """
        counts = [n if a < dims else 1 for a in range(3)]
        return cls(*counts, *(length / m for m in counts))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dz)

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    @property
    def active(self) -> tuple[bool, bool, bool]:
        return (self.nx > 1, self.ny > 1, self.nz > 1)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def stencil_spacing(self) -> tuple[float, float, float]:
        # 0.0 tells the kernels the axis is degenerate
        return tuple(h if on else 0.0 for h, on in zip(self.spacing, self.active))

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Node coordinates ``x_i = i*dx`` broadcast to the full grid shape."""
        axes = [np.arange(n) * h for n, h in zip(self.shape, self.spacing)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def zeros(self, components: int | None = None) -> np.ndarray:
        if components is None:
            return np.zeros(self.shape)
        return np.zeros((components,) + self.shape)

    def check_scalar(self, f: np.ndarray, name: str = "field") -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        if f.shape[-3:] != self.shape:
            raise GridError(f"{name} has shape {f.shape}, grid is {self.shape}")
        return f

    def check_vector(self, v: np.ndarray, name: str = "field") -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape[-4:] != (3,) + self.shape:
            raise GridError(f"{name} has shape {v.shape}, expected (..., 3, {self.nx}, {self.ny}, {self.nz})")
        return v


def _batched(f: np.ndarray, inner: int):
    lead = f.shape[: f.ndim - inner]
    flat = np.ascontiguousarray(f).reshape((-1,) + f.shape[f.ndim - inner:])
    return lead, flat


def grad(grid: Grid, f: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Centered-difference gradient of a scalar field."""
    f = grid.check_scalar(f)
    k = _backend.get_kernels(backend)
    lead, flat = _batched(f, 3)
    out = np.empty((flat.shape[0], 3) + grid.shape)
    for b in range(flat.shape[0]):
        k.grad(flat[b : b + 1], *grid.stencil_spacing, out[b])
    return out.reshape(lead + (3,) + grid.shape)


def div(grid: Grid, v: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Centered-difference divergence of a vector field."""
    v = grid.check_vector(v)
    k = _backend.get_kernels(backend)
    lead, flat = _batched(v, 4)
    out = np.empty((flat.shape[0],) + grid.shape)
    for b in range(flat.shape[0]):
        k.div(flat[b], *grid.stencil_spacing, out[b])
    return out.reshape(lead + grid.shape)


def curl(grid: Grid, v: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Centered-difference curl of a vector field."""
    v = grid.check_vector(v)
    k = _backend.get_kernels(backend)
    lead, flat = _batched(v, 4)
    out = np.empty((flat.shape[0], 3) + grid.shape)
    for b in range(flat.shape[0]):
        k.curl(flat[b], *grid.stencil_spacing, out[b])
    return out.reshape(lead + (3,) + grid.shape)


def laplacian(grid: Grid, f: np.ndarray, backend: str | None = None) -> np.ndarray:
    """``div(grad f)`` with the same stencils (a wide, 2h-spaced Laplacian)."""
    return div(grid, grad(grid, f, backend), backend)


def integrate(grid: Grid, f: np.ndarray) -> float:
    """``sum(f) * dV`` over the last three axes; NumPy's pairwise sum is order-fixed."""
    return float(np.sum(f) * grid.cell_volume)


def l2_norm(grid: Grid, f: np.ndarray) -> float:
    """Continuum L2 norm ``sqrt(sum |f|^2 dV)`` of a scalar or vector field."""
    return math.sqrt(float(np.sum(np.square(f))) * grid.cell_volume)


# -- convergence harness ------------------------------------------------------

_TWO_PI = 2.0 * math.pi


def _case_sin(grid):
    x, y, z = grid.coords()
    L = grid.lengths
    kx, ky, kz = (_TWO_PI / l for l in L)
    f = np.sin(kx * x) * np.cos(ky * y) * np.cos(kz * z)
    g = np.stack([
        kx * np.cos(kx * x) * np.cos(ky * y) * np.cos(kz * z),
        -ky * np.sin(kx * x) * np.sin(ky * y) * np.cos(kz * z),
        -kz * np.sin(kx * x) * np.cos(ky * y) * np.sin(kz * z),
    ])
    lap = -(kx**2 + ky**2 + kz**2) * f
    return f, g, lap


def _case_trig_vector(grid):
    x, y, z = grid.coords()
    kx, ky, kz = (_TWO_PI / l for l in grid.lengths)
    v = np.stack([np.sin(ky * y), np.sin(kz * z), np.sin(kx * x)])
    v = v + np.stack([np.cos(kx * x), np.cos(ky * y), np.cos(kz * z)])
    curl_v = np.stack([-kz * np.cos(kz * z), -kx * np.cos(kx * x), -ky * np.cos(ky * y)])
    div_v = -kx * np.sin(kx * x) - ky * np.sin(ky * y) - kz * np.sin(kz * z)
    return v, div_v, curl_v


def _analytic(op: str, case: str, grid: Grid):
    if case == "sin" and op in ("grad", "laplacian", "identity"):
        f, g, lap = _case_sin(grid)
        if op == "grad":
            return (lambda: grad(grid, f)), g
        if op == "laplacian":
            return (lambda: laplacian(grid, f)), lap
        return (lambda: f.copy()), f
    if case == "trig" and op in ("div", "curl", "identity"):
        v, dv, cv = _case_trig_vector(grid)
        if op == "div":
            return (lambda: div(grid, v)), dv
        if op == "curl":
            return (lambda: curl(grid, v)), cv
        return (lambda: v.copy()), v
    raise GridError(f"no periodic analytic case {case!r} for operator {op!r}")


OPERATORS = ("grad", "div", "curl", "laplacian", "identity")
CASES = {"grad": ("sin",), "laplacian": ("sin",), "div": ("trig",), "curl": ("trig",), "identity": ("sin", "trig")}


def convergence_errors(op: str, case: str, resolutions: Sequence[int]) -> tuple[list[float], list[float]]:
    """Spacings and L2 errors of ``op`` on the analytic ``case`` at each resolution."""
    if len(resolutions) < 3:
        raise GridError("need at least 3 resolutions")
    if any(n < 8 for n in resolutions):
        raise GridError("each resolution must be >= 8")
    hs, errs = [], []
    for n in resolutions:
        g = Grid.cube(n)
        compute, exact = _analytic(op, case, g)
        errs.append(l2_norm(g, compute() - exact))
        hs.append(g.dx)
    return hs, errs


def convergence_order(op: str, case: str, resolutions: Sequence[int]) -> float:
    """Least-squares slope of log(L2 error) against log(h).

    Returns ``math.inf`` when every error is exactly zero (the operator is
    exact on the case, e.g. ``identity``).
    """
    hs, errs = convergence_errors(op, case, resolutions)
    if all(e == 0.0 for e in errs):
        return math.inf
    if any(e == 0.0 for e in errs):
        raise GridError(f"{op}: some but not all errors vanish ({errs}); order undefined")
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope)


def format_order(order: float) -> str:
    return "exact" if math.isinf(order) else f"{order:.3f}"
