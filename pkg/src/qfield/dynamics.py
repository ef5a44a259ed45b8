"""Explicit time evolution of the seven-component field.

The inhomogeneous equations, solved for the time derivatives::

    dE/dt =  c curl B - c grad T - 4 pi J
    dB/dt = -c curl E
    dT/dt =  c div E - 4 pi c rho

are advanced with classical RK4 on the collocated periodic grid.  With no
sources the semi-discrete system conserves the pseudo-energy

    Q = integral (E^2 + B^2 - T^2) / 8 pi dV

exactly: ``sum(E . curl B) = sum(B . curl E)`` and
``sum(T div E) = -sum(E . grad T)`` because the centered stencils are
antisymmetric.  The ordinary energy ``U`` (with ``+T^2``) is not
conserved: each Fourier mode of the scalar sector obeys
``T'' = c^2 k^2 T`` and grows like ``cosh(c k t)``.  That growth is a
property of the equations; runs either stay short or apply the optional
sharp spectral low-pass filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .grid import Grid, div, integrate, l2_norm, laplacian
from .potential import PotentialField, fields_from_potential
from .state import FieldState, MissingTimeDerivative, Sources

__all__ = [
    "EvolutionConfig",
    "DiagnosticsRow",
    "RunResult",
    "CFLError",
    "NonFiniteError",
    "FieldRates",
    "cfl_limit",
    "evolution_rhs",
    "step",
    "run",
    "energy",
    "pseudo_energy",
    "diagnostics",
    "source_consistency_residual",
    "spectral_filter",
    "zero_state",
    "transverse_wave",
    "scalar_mode",
    "gaussian_T_pulse",
    "state_from_potential",
]

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi


class CFLError(ValueError):
    """Time step above the stability bound."""


class NonFiniteError(FloatingPointError):
    """The state became non-finite; ``step`` is the offending step index."""

    def __init__(self, step: int, rows: list | None = None):
        super().__init__(f"non-finite field values at step {step}")
        self.step = step
        self.rows = rows or []


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    steps: int
    scheme: str = "RK4"
    cfl_safety: float = 0.5
    spectral_filter: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (isinstance(self.steps, int) and self.steps > 0):
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if self.scheme != "RK4":
            raise ValueError(f"unsupported scheme {self.scheme!r} (only RK4)")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if self.spectral_filter is not None and not 0 < self.spectral_filter <= 1:
            raise ValueError(f"spectral_filter must be in (0, 1], got {self.spectral_filter}")

    def check_cfl(self, grid: Grid, c: float) -> None:
        limit = self.cfl_safety * cfl_limit(grid, c)
        if self.dt > limit:
            raise CFLError(f"dt={self.dt} exceeds cfl_safety * dt_max = {limit}")


@dataclass(frozen=True)
class DiagnosticsRow:
    step: int
    t: float
    energy_u: float
    pseudo_energy_q: float
    divB_l2: float
    gauss_residual_l2: float
    maxT: float

    FIELDS = ("step", "t", "energy_u", "pseudo_energy_q", "divB_l2", "gauss_residual_l2", "maxT")

    def values(self) -> tuple:
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass
class RunResult:
    rows: list[DiagnosticsRow]
    final: FieldState
    snapshots: list[tuple[int, FieldState]] = field(default_factory=list)


@dataclass
class FieldRates:
    dT: np.ndarray
    dE: np.ndarray
    dB: np.ndarray


def cfl_limit(grid: Grid, c: float) -> float:
    """``min(active spacings) / (c sqrt 3)``; the sqrt(3) is kept for 1-D and 2-D grids."""
    h = min(s for s, on in zip(grid.spacing, grid.active) if on)
    return h / (c * math.sqrt(3.0))


def _packed_rhs(grid: Grid, y: np.ndarray, rho: np.ndarray, J: np.ndarray, c: float,
                out: np.ndarray | None = None) -> np.ndarray:
    if out is None:
        out = np.empty_like(y)
    _backend.kernels.maxwell_rhs(y, rho, J, c, *grid.stencil_spacing, out)
    return out


def evolution_rhs(F: FieldState, S: Sources) -> FieldRates:
    """Time derivatives of ``T``, ``E``, ``B`` for state ``F`` under sources ``S``."""
    rho, J = S.explicit_terms(F.grid)
    d = _packed_rhs(F.grid, F.packed(), rho, J, F.c)
    return FieldRates(d[0], d[1:4], d[4:7])


def spectral_filter(grid: Grid, y: np.ndarray, cutoff: float) -> np.ndarray:
    """Zero every Fourier mode whose index exceeds ``cutoff * n/2`` on any active axis."""
    spec = np.fft.fftn(y, axes=(-3, -2, -1))
    keep = np.ones(grid.shape, dtype=bool)
    for a, n in enumerate(grid.shape):
        if n == 1:
            continue
        m = np.abs(np.fft.fftfreq(n, 1.0 / n))
        ok = m <= cutoff * (n / 2)
        shape = [1, 1, 1]
        shape[a] = n
        keep &= ok.reshape(shape)
    spec *= keep
    return np.ascontiguousarray(np.fft.ifftn(spec, axes=(-3, -2, -1)).real)


def _rk4(grid, y, rho, J, c, dt):
    k1 = _packed_rhs(grid, y, rho, J, c)
    k2 = _packed_rhs(grid, y + (0.5 * dt) * k1, rho, J, c)
    k3 = _packed_rhs(grid, y + (0.5 * dt) * k2, rho, J, c)
    k4 = _packed_rhs(grid, y + dt * k3, rho, J, c)
    return y + (dt / 6.0) * (((k1 + 2.0 * k2) + 2.0 * k3) + k4)


def step(F: FieldState, S: Sources, cfg: EvolutionConfig) -> FieldState:
    """Advance ``F`` by one RK4 step of ``cfg.dt``."""
    cfg.check_cfl(F.grid, F.c)
    rho, J = S.explicit_terms(F.grid)
    y = _rk4(F.grid, F.packed(), rho, J, F.c, cfg.dt)
    if cfg.spectral_filter is not None:
        y = spectral_filter(F.grid, y, cfg.spectral_filter)
    return FieldState.from_packed(F.grid, y, F.t + cfg.dt, F.c)


# -- diagnostics ---------------------------------------------------------------------


def energy(F: FieldState) -> float:
    """``U = integral (E^2 + B^2 + T^2) / 8 pi dV``."""
    g = F.grid
    return integrate(g, (np.sum(F.E**2, axis=0) + np.sum(F.B**2, axis=0)) + F.T**2) / EIGHT_PI


def pseudo_energy(F: FieldState) -> float:
    """``Q = integral (E^2 + B^2 - T^2) / 8 pi dV``."""
    g = F.grid
    return integrate(g, (np.sum(F.E**2, axis=0) + np.sum(F.B**2, axis=0)) - F.T**2) / EIGHT_PI


def gauss_residual(prev: FieldState, cur: FieldState, S: Sources) -> np.ndarray:
    """``div E - (1/c) dT/dt - 4 pi rho`` at the midpoint of two consecutive states."""
    dt = cur.t - prev.t
    rho, _ = S.explicit_terms(cur.grid)
    E_mid = 0.5 * (prev.E + cur.E)
    return div(cur.grid, E_mid) - (cur.T - prev.T) / (dt * cur.c) - FOUR_PI * rho


def diagnostics(step_index: int, prev: FieldState, cur: FieldState, S: Sources) -> DiagnosticsRow:
    g = cur.grid
    return DiagnosticsRow(
        step=step_index,
        t=cur.t,
        energy_u=energy(cur),
        pseudo_energy_q=pseudo_energy(cur),
        divB_l2=l2_norm(g, div(g, cur.B)),
        gauss_residual_l2=l2_norm(g, gauss_residual(prev, cur, S)),
        maxT=float(np.max(np.abs(cur.T))),
    )


def run(F0: FieldState, S: Sources, cfg: EvolutionConfig, snapshot_every: int | None = None,
        on_row: Callable[[DiagnosticsRow], None] | None = None,
        keep_history: bool = False) -> RunResult:
    """Advance ``F0`` for ``cfg.steps`` steps, one diagnostics row per step.

    Snapshots (copies) are kept every ``snapshot_every`` steps and always
    for the final step when ``snapshot_every`` is set.  On a non-finite
    state ``NonFiniteError`` is raised carrying the rows produced so far.
    With ``keep_history`` every state is retained in ``RunResult.snapshots``.
    """
    cfg.check_cfl(F0.grid, F0.c)
    rows: list[DiagnosticsRow] = []
    snaps: list[tuple[int, FieldState]] = []
    if keep_history:
        snaps.append((0, F0.copy()))
    cur = F0
    for n in range(1, cfg.steps + 1):
        # overflow is caught by the finiteness check below
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = step(cur, S, cfg)
        if not np.all(np.isfinite(nxt.packed())):
            raise NonFiniteError(n, rows)
        row = diagnostics(n, cur, nxt, S)
        rows.append(row)
        if on_row is not None:
            on_row(row)
        cur = nxt
        if keep_history or (snapshot_every and (n % snapshot_every == 0 or n == cfg.steps)):
            snaps.append((n, cur.copy()))
    return RunResult(rows, cur, snaps)


def source_consistency_residual(history: Sequence[FieldState],
                                sources: Sources | Sequence[Sources] | None = None) -> np.ndarray:
    """``(1/c^2) d2T/dt2 + lap T + (4 pi / c)(d rho/dt + div J)`` at the middle state.

    ``history`` holds three equally spaced states.  ``sources`` is one
    static ``Sources`` or three, matching the states.  Only explicit
    sources enter; in identified mode the residual is the continuity
    equation of the charge and current read off ``T``.
    """
    if len(history) != 3:
        raise MissingTimeDerivative("need three consecutive states")
    a, b, c_ = history
    dt = b.t - a.t
    if not (dt > 0 and math.isclose(c_.t - b.t, dt, rel_tol=1e-9)):
        raise ValueError("states must be equally spaced in time")
    g, c = b.grid, b.c
    d2T = (c_.T - 2.0 * b.T + a.T) / (dt * dt)
    res = d2T / (c * c) + laplacian(g, b.T)
    if sources is None:
        return res
    if isinstance(sources, Sources):
        sources = [sources] * 3
    terms = [s.explicit_terms(g) for s in sources]
    drho = (terms[2][0] - terms[0][0]) / (2.0 * dt)
    return res + (FOUR_PI / c) * (drho + div(g, terms[1][1]))


# -- initial data ------------------------------------------------------------------------


def zero_state(grid: Grid, c: float = 1.0) -> FieldState:
    return FieldState.zeros(grid, c=c)


def _k(grid: Grid, mode: int, axis: int = 0) -> float:
    return 2.0 * math.pi * mode / grid.lengths[axis]


def transverse_wave(grid: Grid, amplitude: float = 1.0, mode: int = 1, c: float = 1.0,
                    t: float = 0.0) -> FieldState:
    """``E = y_hat a sin(k(x - ct))``, ``B = z_hat a sin(k(x - ct))``, ``T = 0``."""
    x, _, _ = grid.coords()
    s = amplitude * np.sin(_k(grid, mode) * (x - c * t))
    E, B = grid.zeros(3), grid.zeros(3)
    E[1] = s
    B[2] = s
    return FieldState(grid, grid.zeros(), E, B, t=t, c=c)


def scalar_mode(grid: Grid, epsilon: float = 1e-3, mode: int = 1, c: float = 1.0) -> FieldState:
    """``T = eps sin(k x)`` with ``E = B = 0``; grows like ``eps cosh(c k t)``."""
    x, _, _ = grid.coords()
    T = epsilon * np.sin(_k(grid, mode) * x)
    return FieldState(grid, T, grid.zeros(3), grid.zeros(3), c=c)


def gaussian_T_pulse(grid: Grid, amplitude: float = 1.0, width: float = 0.1,
                     center: Sequence[float] | None = None, c: float = 1.0) -> FieldState:
    """Periodic Gaussian bump in ``T`` (minimum-image distance), ``E = B = 0``."""
    L = grid.lengths
    center = [l / 2 for l in L] if center is None else center
    r2 = np.zeros(grid.shape)
    for a, (X, l, x0, on) in enumerate(zip(grid.coords(), L, center, grid.active)):
        if not on:
            continue
        d = X - x0
        d = d - l * np.round(d / l)
        r2 = r2 + d * d
    T = amplitude * np.exp(-r2 / (2.0 * width * width))
    return FieldState(grid, T, grid.zeros(3), grid.zeros(3), c=c)


def state_from_potential(P: PotentialField) -> FieldState:
    """Initial data ``(T, E, B)`` of a potential; ``div B`` vanishes to rounding."""
    F = fields_from_potential(P)
    return FieldState(F.grid, F.T, F.E, F.B, t=F.t, c=F.c, potential_derived=True)


def scalar_mode_amplitude(F: FieldState, mode: int = 1) -> float:
    """Projection of ``T`` on ``sin(k x)``."""
    x, _, _ = F.grid.coords()
    basis = np.sin(_k(F.grid, mode) * x)
    return float(np.sum(F.T * basis) / np.sum(basis * basis))


def fit_growth_rate(times: Sequence[float], amplitudes: Sequence[float], epsilon: float) -> float:
    """Growth rate ``s`` of ``eps cosh(s t)``: least squares of ``acosh(a/eps)`` on ``t`` through 0."""
    t = np.asarray(times, dtype=float)
    z = np.arccosh(np.maximum(np.asarray(amplitudes, dtype=float) / epsilon, 1.0))
    return float(np.dot(t, z) / np.dot(t, t))
