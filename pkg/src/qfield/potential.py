"""Quaternion derivative of the electromagnetic potential.

The operator ``d/dr = (1/c) d/dt + i d/dx + j d/dy + k d/dz`` applied to a
quaternion field ``X = s + v`` splits into five parts::

    d/dr -> X = (1/c) ds/dt - div v + (1/c) dv/dt + grad s + curl v
    X <- d/dr = (1/c) ds/dt - div v + (1/c) dv/dt + grad s - curl v

so the symmetric derivative ``{d/dr, X}`` keeps everything but the curl
and the antisymmetric one ``[d/dr, X]`` is the curl alone.  From a
potential ``A = U + A``::

    E = -{d/dr, A}  ->  T = -(1/c) dU/dt + div A,  E = -grad U - (1/c) dA/dt
    B = +[d/dr, A]  ->  B = curl A

Time dependence is represented by an odd number of equally spaced
slices.  Each application of ``d/dr`` takes a centered difference in time
and so consumes one slice at each end; a field with ``dt=None`` is static
and its time derivatives are zero.  Because the time and space stencils
commute, the identity-class residuals vanish to rounding for any input,
while the law-class residuals only vanish for actual solutions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid, curl, div, grad
from .quaternion import ProductSide
from .state import FieldState, MissingTimeDerivative, QuatField, SourceMode, Sources

__all__ = [
    "PotentialField",
    "FivePartDerivative",
    "PathMismatchError",
    "NonPotentialFieldWarning",
    "quat_derivative",
    "fields_from_potential",
    "field_paths",
    "law_residual",
    "identity_residual",
    "potential_equation_residual",
    "potential_identity_residual",
    "identified_sources",
    "random_potential",
    "plane_wave_potential",
]

EIGHT_PI = 8.0 * math.pi
FOUR_PI = 4.0 * math.pi
PATH_RTOL = 1e-13


class PathMismatchError(RuntimeError):
    """The combinator and direct field constructions disagree."""


class NonPotentialFieldWarning(UserWarning):
    """An identity residual was requested for fields not derived from a potential."""


@dataclass
class PotentialField:
    """Scalar potential ``U`` and vector potential ``A`` on a grid.

    ``U`` has shape ``(nt, nx, ny, nz)`` and ``A`` ``(nt, 3, nx, ny, nz)``
    with ``nt`` odd; slice ``nt // 2`` is at time ``t``.  With ``dt=None``
    the potential is static (``nt == 1``, zero time derivatives).
    """

    grid: Grid
    U: np.ndarray
    A: np.ndarray
    c: float = 1.0
    dt: float | None = None
    t: float = 0.0

    def __post_init__(self):
        g = self.grid
        U = g.check_scalar(self.U, "U")
        A = g.check_vector(self.A, "A")
        if U.ndim == 3:
            U = U[None]
        if A.ndim == 4:
            A = A[None]
        if U.ndim != 4 or A.ndim != 5 or U.shape[0] != A.shape[0]:
            raise ValueError("U and A need matching time-slice axes")
        nt = U.shape[0]
        if nt % 2 == 0:
            raise ValueError(f"need an odd number of time slices, got {nt}")
        if self.dt is None and nt != 1:
            raise ValueError("a static potential has exactly one slice; give dt for time series")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not (np.all(np.isfinite(U)) and np.all(np.isfinite(A))):
            raise ValueError("potential has non-finite values")
        self.U, self.A = np.ascontiguousarray(U), np.ascontiguousarray(A)

    @property
    def static(self) -> bool:
        return self.dt is None

    @property
    def slices(self) -> int:
        return self.U.shape[0]

    @classmethod
    def static_field(cls, grid: Grid, U: np.ndarray, A: np.ndarray, c: float = 1.0) -> PotentialField:
        return cls(grid, U, A, c=c)

    @classmethod
    def sample(cls, grid: Grid, fn: Callable, t: float = 0.0, dt: float = 0.01,
               slices: int = 5, c: float = 1.0) -> PotentialField:
        """Sample ``fn(t, x, y, z) -> (U, A)`` on ``slices`` levels centred at ``t``."""
        x, y, z = grid.coords()
        half = slices // 2
        Us, As = [], []
        for n in range(-half, half + 1):
            U, A = fn(t + n * dt, x, y, z)
            Us.append(np.broadcast_to(U, grid.shape))
            As.append(np.broadcast_to(A, (3,) + grid.shape))
        return cls(grid, np.array(Us), np.array(As), c=c, dt=dt, t=t)


@dataclass
class FivePartDerivative:
    """``d/dr`` applied to a potential, kept as its five named parts.

    ``curl_part`` carries the side's sign: ``+curl A`` for the right action,
    ``-curl A`` for the left.
    """

    grid: Grid
    time_scalar: np.ndarray
    div_part: np.ndarray
    time_vector: np.ndarray
    grad_part: np.ndarray
    curl_part: np.ndarray
    side: ProductSide

    def quaternion(self) -> QuatField:
        return QuatField(
            self.grid,
            self.time_scalar - self.div_part,
            (self.time_vector + self.grad_part) + self.curl_part,
        )


# -- windowed machinery ---------------------------------------------------------
#
# A "window" is an array with a leading time axis.  _Win bundles a quaternion
# window with its time step; static windows have a single slice and dt=None.


@dataclass
class _Win:
    s: np.ndarray  # (nt, nx, ny, nz)
    v: np.ndarray  # (nt, 3, nx, ny, nz)
    dt: float | None

    @property
    def nt(self) -> int:
        return self.s.shape[0]

    def center(self):
        m = self.nt // 2
        return self.s[m], self.v[m]


def _ddt(x, dt, c):
    # (1/c) d/dt, centered; drops one slice at each end
    if dt is None:
        return np.zeros_like(x)
    return (x[2:] - x[:-2]) / (2.0 * dt) / c


def _inner(x, dt):
    return x if dt is None else x[1:-1]


def _parts(grid: Grid, w: _Win, c: float):
    if w.dt is not None and w.nt < 3:
        raise MissingTimeDerivative(f"need at least 3 time slices for d/dt, have {w.nt}")
    return (
        _ddt(w.s, w.dt, c),
        div(grid, _inner(w.v, w.dt)),
        _ddt(w.v, w.dt, c),
        grad(grid, _inner(w.s, w.dt)),
        curl(grid, _inner(w.v, w.dt)),
    )


def _apply(grid: Grid, w: _Win, side: ProductSide, c: float) -> _Win:
    ts, dp, tv, gp, cp = _parts(grid, w, c)
    if side is ProductSide.LEFT:
        cp = -cp
    return _Win(ts - dp, (tv + gp) + cp, w.dt)


def _window(P: PotentialField) -> _Win:
    return _Win(P.U, P.A, P.dt)


# -- public operations -------------------------------------------------------------


def quat_derivative(P: PotentialField, side: ProductSide) -> FivePartDerivative:
    """Five-part quaternion derivative of ``P`` at its central time."""
    w = _window(P)
    ts, dp, tv, gp, cp = _parts(P.grid, w, P.c)
    m = ts.shape[0] // 2
    sign = 1.0 if side is ProductSide.RIGHT else -1.0
    return FivePartDerivative(P.grid, ts[m], dp[m], tv[m], gp[m], sign * cp[m], side)


def _fields_window(P: PotentialField) -> tuple[_Win, _Win]:
    """``E = -{d/dr, A}`` and ``B = +[d/dr, A]`` from the right and left derivatives."""
    w = _window(P)
    R = _apply(P.grid, w, ProductSide.RIGHT, P.c)
    L = _apply(P.grid, w, ProductSide.LEFT, P.c)
    E = _Win(-0.5 * (R.s + L.s), -0.5 * (R.v + L.v), w.dt)
    B = _Win(0.5 * (R.s - L.s), 0.5 * (R.v - L.v), w.dt)
    return E, B


def _direct_window(P: PotentialField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g, c, dt = P.grid, P.c, P.dt
    T = -_ddt(P.U, dt, c) + div(g, _inner(P.A, dt))
    E = -grad(g, _inner(P.U, dt)) - _ddt(P.A, dt, c)
    B = curl(g, _inner(P.A, dt))
    return T, E, B


def _state_from_window(P: PotentialField, T, E, B) -> FieldState:
    m = T.shape[0] // 2
    kw = {}
    if P.static:
        kw = dict(dT_dt=np.zeros_like(T[0]), dE_dt=np.zeros_like(E[0]), dB_dt=np.zeros_like(B[0]))
    elif T.shape[0] >= 3:
        h2 = 2.0 * P.dt
        kw = dict(dT_dt=(T[m + 1] - T[m - 1]) / h2, dE_dt=(E[m + 1] - E[m - 1]) / h2,
                  dB_dt=(B[m + 1] - B[m - 1]) / h2)
    return FieldState(P.grid, T[m].copy(), E[m].copy(), B[m].copy(), t=P.t, c=P.c,
                      potential_derived=True, **kw)


def field_paths(P: PotentialField) -> tuple[FieldState, FieldState]:
    """The fields of ``P`` built two independent ways: (combinator, direct)."""
    Ew, Bw = _fields_window(P)
    if np.any(Bw.s != 0.0):
        raise PathMismatchError("magnetic quaternion field acquired a scalar part")
    comb = _state_from_window(P, Ew.s, Ew.v, Bw.v)
    direct = _state_from_window(P, *_direct_window(P))
    return comb, direct


def _rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - b))) / scale


def path_discrepancy(comb: FieldState, direct: FieldState) -> float:
    """Largest per-field relative difference between two constructions."""
    names = ["T", "E", "B"] + [n for n in ("dT_dt", "dE_dt", "dB_dt") if getattr(comb, n) is not None]
    return max(_rel_diff(getattr(comb, n), getattr(direct, n)) for n in names)


def fields_from_potential(P: PotentialField, check: bool = True) -> FieldState:
    """``T``, ``E``, ``B`` of a potential at its central time.

    The result comes from the symmetric/antisymmetric combination of the
    right and left derivatives.  With ``check`` the direct component
    formulas are evaluated too and must agree to ``PATH_RTOL``.  Time
    derivatives are attached when the potential has at least five slices
    (or is static).
    """
    comb, direct = field_paths(P)
    if check:
        d = path_discrepancy(comb, direct)
        if d > PATH_RTOL:
            raise PathMismatchError(f"combinator and direct paths differ by {d:.3e} (relative)")
    return comb


def _sym(grid: Grid, s, v, ds_dt, dv_dt, c: float) -> QuatField:
    # {d/dr, X} at one instant, time derivatives given
    return QuatField(grid, ds_dt / c - div(grid, v), dv_dt / c + grad(grid, s))


def _antisym(grid: Grid, v) -> QuatField:
    # [d/dr, X]: the curl of the vector part, no scalar part
    return QuatField(grid, np.zeros(grid.shape), curl(grid, v))


def law_residual(F: FieldState) -> QuatField:
    """``[d/dr, B] - {d/dr, E}``.

    Scalar part ``div E - (1/c) dT/dt``, vector part
    ``curl B - (1/c) dE/dt - grad T``; zero only for actual solutions.
    """
    F.require("dT_dt", "dE_dt")
    return _antisym(F.grid, F.B) - _sym(F.grid, F.T, F.E, F.dT_dt, F.dE_dt, F.c)


def identity_residual(F: FieldState) -> QuatField:
    """``[d/dr, E] + {d/dr, B}``: scalar ``-div B``, vector ``curl E + (1/c) dB/dt``.

    Vanishes to rounding for potential-derived fields.  For other fields
    a nonzero residual is meaningful and a ``NonPotentialFieldWarning`` is
    issued.
    """
    F.require("dB_dt")
    if not F.potential_derived:
        warnings.warn("fields were not derived from a potential; the identity need not hold",
                      NonPotentialFieldWarning, stacklevel=2)
    zero = np.zeros(F.grid.shape)
    return _antisym(F.grid, F.E) + _sym(F.grid, zero, F.B, zero, F.dB_dt, F.c)


def _nested(P: PotentialField, outer: ProductSide, inner: ProductSide) -> _Win:
    w = _window(P)
    if not P.static and P.slices < 5:
        raise MissingTimeDerivative(f"second derivatives need 5 time slices, have {P.slices}")
    return _apply(P.grid, _apply(P.grid, w, inner, P.c), outer, P.c)


def potential_equation_residual(P: PotentialField, sources: Sources | None = None) -> QuatField:
    """``d/dr->(d/dr->A) + (A<-d/dr)<-d/dr - 8 pi (rho, J/c)`` at the central time.

    ``sources`` must be explicit (or ``None`` for vacuum).
    """
    g = P.grid
    rr = _nested(P, ProductSide.RIGHT, ProductSide.RIGHT)
    ll = _nested(P, ProductSide.LEFT, ProductSide.LEFT)
    s_r, v_r = rr.center()
    s_l, v_l = ll.center()
    lhs = QuatField(g, s_r + s_l, v_r + v_l)
    if sources is None:
        return lhs
    if sources.mode is SourceMode.IDENTIFIED:
        raise ValueError("identified-with-T sources are already part of the left side; pass explicit sources")
    rho, J = sources.explicit_terms(g)
    return lhs - QuatField(g, EIGHT_PI * rho, EIGHT_PI * (J / P.c))


def potential_identity_residual(P: PotentialField) -> QuatField:
    """``d/dr->(A<-d/dr) - (d/dr->A)<-d/dr``; zero to rounding for any potential."""
    a = _nested(P, ProductSide.RIGHT, ProductSide.LEFT)
    b = _nested(P, ProductSide.LEFT, ProductSide.RIGHT)
    sa, va = a.center()
    sb, vb = b.center()
    return QuatField(P.grid, sa - sb, va - vb)


def identified_sources(F: FieldState) -> Sources:
    """Charge and current read off the temporal field.

    ``rho = (1/(4 pi c)) dT/dt`` and ``J = (c/(4 pi)) grad T``, returned as
    explicit arrays.
    """
    F.require("dT_dt")
    rho = F.dT_dt / (FOUR_PI * F.c)
    J = (F.c / FOUR_PI) * grad(F.grid, F.T)
    return Sources.explicit(F.grid, rho, J)


# -- potentials for tests and scenarios ---------------------------------------------


def random_potential(grid: Grid, rng: np.random.Generator, modes: int = 3, kmax: int = 2,
                     dt: float | None = 0.05, slices: int = 5, c: float = 1.0,
                     t: float = 0.0) -> PotentialField:
    """Sum of ``modes`` random low-wavenumber Fourier modes per component.

    Each of the four components gets amplitude ``N(0, 1)`` modes with
    integer wavevectors in ``[-kmax, kmax]`` on the active axes and random
    phase and angular frequency.  ``dt=None`` gives a static potential.
    """
    L = grid.lengths
    active = grid.active
    params = []
    for _ in range(4):
        comp = []
        for _ in range(modes):
            kvec = [2.0 * math.pi * rng.integers(-kmax, kmax + 1) / l if on else 0.0
                    for l, on in zip(L, active)]
            comp.append((rng.normal(), kvec, rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2)))
        params.append(comp)

    def fn(tt, x, y, z):
        out = []
        for comp in params:
            f = np.zeros(grid.shape)
            for amp, (kx, ky, kz), phase, omega in comp:
                f = f + amp * np.sin(kx * x + ky * y + kz * z + omega * tt + phase)
            out.append(f)
        return out[0], np.stack(out[1:])

    if dt is None:
        x, y, z = grid.coords()
        U, A = fn(t, x, y, z)
        return PotentialField(grid, U, A, c=c, t=t)
    return PotentialField.sample(grid, fn, t=t, dt=dt, slices=slices, c=c)


def plane_wave_potential(grid: Grid, amplitude: float = 1.0, mode: int = 1, c: float = 1.0,
                         t: float = 0.0, dt: float = 0.01, slices: int = 5) -> PotentialField:
    """Vacuum plane wave ``U = 0``, ``A = y_hat * a * sin(k (x - c t))``."""
    k = 2.0 * math.pi * mode / grid.lengths[0]

    def fn(tt, x, y, z):
        A = np.zeros((3,) + grid.shape)
        A[1] = amplitude * np.sin(k * (x - c * tt))
        return np.zeros(grid.shape), A

    return PotentialField.sample(grid, fn, t=t, dt=dt, slices=slices, c=c)
