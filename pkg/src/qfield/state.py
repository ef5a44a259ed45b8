"""Field containers shared by the engine, the solver and the thermo tools."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, GridError, l2_norm
from .quaternion import Quaternion

__all__ = ["QuatField", "FieldState", "Sources", "SourceMode", "MissingTimeDerivative"]


class MissingTimeDerivative(ValueError):
    """An operation needs time-derivative information the field does not carry."""


@dataclass
class QuatField:
    """One quaternion per cell: a scalar field plus a vector field."""

    grid: Grid
    scalar: np.ndarray
    vector: np.ndarray

    def __post_init__(self):
        self.scalar = self.grid.check_scalar(self.scalar, "scalar part")
        self.vector = self.grid.check_vector(self.vector, "vector part")

    @classmethod
    def zeros(cls, grid: Grid) -> QuatField:
        return cls(grid, grid.zeros(), grid.zeros(3))

    def at(self, i: int, j: int = 0, k: int = 0) -> Quaternion:
        v = self.vector[:, i, j, k]
        return Quaternion(float(self.scalar[i, j, k]), float(v[0]), float(v[1]), float(v[2]))

    def __add__(self, other: QuatField) -> QuatField:
        return QuatField(self.grid, self.scalar + other.scalar, self.vector + other.vector)

    def __sub__(self, other: QuatField) -> QuatField:
        return QuatField(self.grid, self.scalar - other.scalar, self.vector - other.vector)

    def __neg__(self) -> QuatField:
        return QuatField(self.grid, -self.scalar, -self.vector)

    def scaled(self, s: float) -> QuatField:
        return QuatField(self.grid, s * self.scalar, s * self.vector)

    def linf(self) -> float:
        return float(max(np.max(np.abs(self.scalar)), np.max(np.abs(self.vector))))

    def l2(self) -> float:
        return float(np.hypot(l2_norm(self.grid, self.scalar), l2_norm(self.grid, self.vector)))


@dataclass
class FieldState:
    """The seven field components ``T, E, B`` at time ``t``.

    ``dT_dt``, ``dE_dt`` and ``dB_dt`` are optional time derivatives at the
    same instant; operations that need them raise ``MissingTimeDerivative``.
    ``potential_derived`` records that the fields came from a potential, so
    the algebraic identities are expected to hold.
    """

    grid: Grid
    T: np.ndarray
    E: np.ndarray
    B: np.ndarray
    t: float = 0.0
    c: float = 1.0
    dT_dt: np.ndarray | None = None
    dE_dt: np.ndarray | None = None
    dB_dt: np.ndarray | None = None
    potential_derived: bool = False

    def __post_init__(self):
        g = self.grid
        self.T = g.check_scalar(self.T, "T")
        self.E = g.check_vector(self.E, "E")
        self.B = g.check_vector(self.B, "B")
        if self.T.ndim != 3 or self.E.ndim != 4 or self.B.ndim != 4:
            raise GridError("FieldState holds a single time level")
        if self.dT_dt is not None:
            self.dT_dt = g.check_scalar(self.dT_dt, "dT_dt")
        if self.dE_dt is not None:
            self.dE_dt = g.check_vector(self.dE_dt, "dE_dt")
        if self.dB_dt is not None:
            self.dB_dt = g.check_vector(self.dB_dt, "dB_dt")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")

    @classmethod
    def zeros(cls, grid: Grid, c: float = 1.0, t: float = 0.0) -> FieldState:
        return cls(grid, grid.zeros(), grid.zeros(3), grid.zeros(3), t=t, c=c)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise MissingTimeDerivative(f"field state lacks {', '.join(missing)}")

    def electric(self) -> QuatField:
        """``E = T + E`` as a quaternion field."""
        return QuatField(self.grid, self.T, self.E)

    def magnetic(self) -> QuatField:
        """``B = 0 + B``; the scalar part is zero by construction."""
        return QuatField(self.grid, np.zeros_like(self.T), self.B)

    def packed(self) -> np.ndarray:
        """``[T, Ex, Ey, Ez, Bx, By, Bz]`` as one ``(7, nx, ny, nz)`` array."""
        return np.concatenate([self.T[None], self.E, self.B])

    @classmethod
    def from_packed(cls, grid: Grid, y: np.ndarray, t: float, c: float) -> FieldState:
        return cls(grid, y[0].copy(), y[1:4].copy(), y[4:7].copy(), t=t, c=c)

    def copy(self) -> FieldState:
        dup = lambda a: None if a is None else a.copy()  # noqa: E731
        return replace(self, T=self.T.copy(), E=self.E.copy(), B=self.B.copy(),
                       dT_dt=dup(self.dT_dt), dE_dt=dup(self.dE_dt), dB_dt=dup(self.dB_dt))


def with_time_derivatives(prev: FieldState, cur: FieldState, nxt: FieldState) -> FieldState:
    """Attach centered time derivatives built from three equally spaced states."""
    dt_a, dt_b = cur.t - prev.t, nxt.t - cur.t
    if not (dt_a > 0 and np.isclose(dt_a, dt_b, rtol=1e-9, atol=0.0)):
        raise ValueError(f"states are not equally spaced in time ({prev.t}, {cur.t}, {nxt.t})")
    h2 = nxt.t - prev.t
    return replace(
        cur.copy(),
        dT_dt=(nxt.T - prev.T) / h2,
        dE_dt=(nxt.E - prev.E) / h2,
        dB_dt=(nxt.B - prev.B) / h2,
    )


class SourceMode(enum.Enum):
    IDENTIFIED = "identified"  # charge and current are the T terms themselves
    EXPLICIT = "explicit"  # independent rho, J added alongside the T terms


@dataclass
class Sources:
    """Charge density ``rho`` and current density ``J``.

    In ``IDENTIFIED`` mode no arrays are stored: the sources are read off
    ``T`` and the evolution equations carry no extra terms.
    """

    mode: SourceMode = SourceMode.EXPLICIT
    rho: np.ndarray | None = None
    J: np.ndarray | None = None

    def __post_init__(self):
        if self.mode is SourceMode.IDENTIFIED:
            if self.rho is not None or self.J is not None:
                raise ValueError("identified-with-T sources store no arrays")
        else:
            for name in ("rho", "J"):
                a = getattr(self, name)
                if a is not None and not np.all(np.isfinite(a)):
                    raise ValueError(f"{name} has non-finite values")

    @classmethod
    def identified(cls) -> Sources:
        return cls(SourceMode.IDENTIFIED)

    @classmethod
    def explicit(cls, grid: Grid, rho: np.ndarray | None = None, J: np.ndarray | None = None) -> Sources:
        rho = grid.zeros() if rho is None else grid.check_scalar(rho, "rho").copy()
        J = grid.zeros(3) if J is None else grid.check_vector(J, "J").copy()
        return cls(SourceMode.EXPLICIT, rho, J)

    @classmethod
    def zero(cls, grid: Grid) -> Sources:
        return cls.explicit(grid)

    def explicit_terms(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        """The ``(rho, J)`` that enter the evolution equations as extra terms."""
        if self.mode is SourceMode.IDENTIFIED:
            return grid.zeros(), grid.zeros(3)
        rho = grid.zeros() if self.rho is None else grid.check_scalar(self.rho, "rho")
        J = grid.zeros(3) if self.J is None else grid.check_vector(self.J, "J")
        return np.ascontiguousarray(rho), np.ascontiguousarray(J)
