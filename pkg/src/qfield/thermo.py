"""Thermoelectric bookkeeping of the temporal field.

Covers the heat absorbed or released by a charge under ``T``
(``dW = -q T c dt``), the four-term heat balance obtained by dotting the
inhomogeneous Ampere law with ``J / sigma``, the Thomson heat and its
current-reversal measurement, the field ``E_T`` driven by ``dT/dt``, the
``D``/``H`` construction, and two closed-form scenarios (a charge crossing
a smoothed ``T`` step, and a uniformly heated ball).

``K`` is temperature; ``dT/dK`` is the medium's temporal-field heat
capacity parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Grid, div, grad, l2_norm
from .state import FieldState

__all__ = [
    "Material",
    "ProbeCharge",
    "HeatBalanceTerms",
    "ThomsonResult",
    "ThomsonScenario",
    "NonzeroMeanError",
    "IncompatibleSourceError",
    "temporal_work",
    "heat_balance",
    "thomson_heat",
    "thomson_coefficient",
    "thomson_reversal_experiment",
    "poisson_periodic",
    "DHResult",
    "split_ET",
    "build_DH",
    "SeebeckProfile",
    "seebeck_jump",
    "heated_ball_field",
]

FOUR_PI = 4.0 * math.pi
POISSON_TOL = 1e-10


class NonzeroMeanError(ValueError):
    """Periodic Poisson source with a component the discrete Laplacian cannot reach."""

    def __init__(self, msg: str, norm: float):
        super().__init__(msg)
        self.norm = norm


class IncompatibleSourceError(ValueError):
    """The right side of a curl equation is not divergence-free."""

    def __init__(self, msg: str, norm: float):
        super().__init__(msg)
        self.norm = norm


@dataclass(frozen=True)
class Material:
    """Conductivity ``sigma``, ``dT/dK`` and temperature ``K`` (scalars or fields)."""

    sigma: float | np.ndarray
    dTdK: float | np.ndarray
    K: float | np.ndarray = 0.0

    def __post_init__(self):
        if not np.all(np.asarray(self.sigma) > 0):
            raise ValueError("sigma must be positive everywhere")
        for name in ("sigma", "dTdK", "K"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class ProbeCharge:
    q: float
    x: tuple[float, float, float] = (0.0, 0.0, 0.0)
    v: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def check(self, c: float) -> None:
        if math.hypot(*self.v) >= c:
            raise ValueError(f"probe speed {math.hypot(*self.v)} must be below c={c}")


@dataclass(frozen=True)
class HeatBalanceTerms:
    joule: float
    thomson: float
    curl_term: float
    displacement_term: float

    @property
    def residual(self) -> float:
        return ((self.joule + self.thomson) + self.curl_term) + self.displacement_term

    @property
    def scale(self) -> float:
        return max(abs(self.joule), abs(self.thomson), abs(self.curl_term), abs(self.displacement_term))


@dataclass(frozen=True)
class ThomsonResult:
    dQ_dt: float
    h_T: float


def temporal_work(probe: ProbeCharge, T_along_path: Sequence[float], dt: float, c: float = 1.0) -> float:
    """``W = -q c integral T dt`` by the trapezoidal rule over uniform samples.

    ``q > 0`` in ``T > 0`` gives ``W < 0``: the pair absorbs heat.
    """
    T = np.asarray(T_along_path, dtype=float)
    if T.size == 0:
        raise ValueError("empty temporal-field series")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    probe.check(c)
    return -probe.q * c * float(np.trapezoid(T, dx=dt))


def _sigma_check(sigma: float) -> None:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")


def heat_balance(J, sigma: float, dTdK: float, gradK, curlB, dEdt, c: float = 1.0) -> HeatBalanceTerms:
    """The four heat terms at a point; they sum to zero when Ampere's law holds there.

    joule = J^2/sigma, thomson = (c/4 pi sigma)(dT/dK) J.grad K,
    curl_term = -(c/4 pi sigma) J.curl B, displacement_term = (1/4 pi sigma) J.dE/dt
    """
    _sigma_check(sigma)
    J, gradK, curlB, dEdt = (np.asarray(a, dtype=float) for a in (J, gradK, curlB, dEdt))
    k = c / (FOUR_PI * sigma)
    return HeatBalanceTerms(
        joule=float(J @ J) / sigma,
        thomson=k * dTdK * float(J @ gradK),
        curl_term=-k * float(J @ curlB),
        displacement_term=float(J @ dEdt) / (FOUR_PI * sigma),
    )


def thomson_coefficient(sigma: float, dTdK: float, c: float = 1.0) -> float:
    """Thomson specific heat ``h_T = -(c / 4 pi sigma) dT/dK``."""
    _sigma_check(sigma)
    return -(c / (FOUR_PI * sigma)) * dTdK


def thomson_heat(J, gradK, sigma: float, dTdK: float, c: float = 1.0) -> ThomsonResult:
    """``dQ/dt = J^2/sigma - h_T J.grad K``."""
    J, gradK = np.asarray(J, dtype=float), np.asarray(gradK, dtype=float)
    h = thomson_coefficient(sigma, dTdK, c)
    return ThomsonResult(dQ_dt=float(J @ J) / sigma - h * float(J @ gradK), h_T=h)


@dataclass(frozen=True)
class ThomsonScenario:
    """Point values for the current-reversal experiment.

    ``curl B`` is manufactured for each current direction so that the
    Ampere law with the temporal field holds exactly at the point:
    ``curl B = (1/c) dE/dt + (dT/dK) grad K + (4 pi / c) J``.
    """

    J: tuple[float, float, float]
    gradK: tuple[float, float, float]
    dEdt: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def curl_b(self, J: np.ndarray, dTdK: float, c: float) -> np.ndarray:
        return (np.asarray(self.dEdt, dtype=float) / c + dTdK * np.asarray(self.gradK, dtype=float)) \
            + (FOUR_PI / c) * J


def thomson_reversal_experiment(scenario: ThomsonScenario, sigma: float, dTdK: float,
                                c: float = 1.0) -> float:
    """Estimate ``h_T`` from the heat exchanged with ``+J`` and with ``-J``.

    The heat taken up is read from the field side of the balance,
    ``dQ/dt = -(curl_term + displacement_term)``.  Joule heat is even in
    ``J`` and drops out of the difference, which is twice the Thomson heat.
    """
    J = np.asarray(scenario.J, dtype=float)
    gradK = np.asarray(scenario.gradK, dtype=float)
    dEdt = np.asarray(scenario.dEdt, dtype=float)
    if np.any(dEdt != 0.0):
        raise ValueError("reversal experiment needs dE/dt = 0")
    jg = float(J @ gradK)
    if jg == 0.0:
        raise ValueError("J . grad K = 0: the Thomson heat cannot be isolated")
    heats = []
    for Js in (J, -J):
        t = heat_balance(Js, sigma, dTdK, gradK, scenario.curl_b(Js, dTdK, c), dEdt, c)
        heats.append(-(t.curl_term + t.displacement_term))
    return -(heats[0] - heats[1]) / (2.0 * jg)


# -- periodic Poisson solves ------------------------------------------------------------


def _symbols(grid: Grid):
    # Fourier symbol of the centered first difference: i * sin(k h) / h per axis
    out = []
    for a, (n, h) in enumerate(zip(grid.shape, grid.spacing)):
        shape = [1, 1, 1]
        shape[a] = n
        if n == 1:
            out.append(np.zeros(shape))
            continue
        k = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
        out.append((np.sin(k * h) / h).reshape(shape))
    return out


def _symbol_squared(s):
    # sin(pi) is not exactly zero in floating point, hence the relative test
    sym2 = s[0] ** 2 + s[1] ** 2 + s[2] ** 2
    return sym2, sym2 <= 1e-12 * max(float(sym2.max()), 1e-300)


def poisson_periodic(grid: Grid, source: np.ndarray, subtract_mean: bool = False) -> tuple[np.ndarray, float]:
    """Solve ``div(grad phi) = source`` with the discrete operators; zero-mean ``phi``.

    The discrete Laplacian annihilates the constant and the odd-even
    (Nyquist) modes.  Their content in ``source`` is reported; above
    ``POISSON_TOL`` (relative) it raises ``NonzeroMeanError`` unless
    ``subtract_mean`` is set, in which case it is projected out.
    Returns ``(phi, removed_norm)``.
    """
    source = grid.check_scalar(source, "source")
    s = _symbols(grid)
    sym2, null = _symbol_squared(s)
    spec = np.fft.fftn(source)
    removed = float(np.sqrt(np.sum(np.abs(spec[np.broadcast_to(null, spec.shape)]) ** 2) / source.size))
    scale = max(float(np.sqrt(np.mean(source**2))), 1e-300)
    if removed > POISSON_TOL * scale and not subtract_mean:
        raise NonzeroMeanError(
            f"source has {removed:.3e} (rms) in the constant/odd-even null space of the discrete "
            "Laplacian; subtract it (subtract_mean=True) to proceed", removed)
    phi_hat = np.where(null, 0.0, -spec / np.where(null, 1.0, sym2))
    return np.ascontiguousarray(np.fft.ifftn(phi_hat).real), removed


def split_ET(F: FieldState, subtract_mean: bool = False) -> np.ndarray:
    """Curl-free, zero-mean ``E_T`` with ``div E_T = (1/c) dT/dt``.

    Uses ``F.dT_dt``.  ``E_T = grad phi`` where ``div(grad phi)`` equals the
    source to the Poisson tolerance, so ``curl E_T`` vanishes to rounding.
    """
    F.require("dT_dt")
    phi, _ = poisson_periodic(F.grid, F.dT_dt / F.c, subtract_mean=subtract_mean)
    return grad(F.grid, phi)


@dataclass
class DHResult:
    D: np.ndarray
    H: np.ndarray
    E_T: np.ndarray
    B_T: np.ndarray
    incompatibility: float  # L2 norm of div(right side of curl B_T)


def _solve_curl(grid: Grid, R: np.ndarray) -> np.ndarray:
    # divergence-free, zero-mean B with curl B equal to the transverse part of R
    s = _symbols(grid)
    sym2, null = _symbol_squared(s)
    Rh = np.fft.fftn(R, axes=(-3, -2, -1))
    inv = np.where(null, 0.0, 1.0 / np.where(null, 1.0, sym2))
    # B_hat = i (sigma x R_hat) / |sigma|^2
    Bh = np.stack([
        1j * (s[1] * Rh[2] - s[2] * Rh[1]) * inv,
        1j * (s[2] * Rh[0] - s[0] * Rh[2]) * inv,
        1j * (s[0] * Rh[1] - s[1] * Rh[0]) * inv,
    ])
    return np.ascontiguousarray(np.fft.ifftn(Bh, axes=(-3, -2, -1)).real)


def build_DH(F: FieldState, E_T: np.ndarray, dET_dt: np.ndarray | None = None,
             strict: bool = True, tol: float = 1e-8) -> DHResult:
    """``D = E - E_T`` and ``H = B - B_T`` with ``curl B_T = (1/c) dE_T/dt + grad T``.

    ``B_T`` is completed with ``div B_T = 0`` and zero mean.  The curl
    equation only has a solution when its right side is divergence-free;
    the L2 norm of that divergence is returned as ``incompatibility``.
    With ``strict`` a value above ``tol`` (relative to the larger of the two
    terms on the right side)
    raises ``IncompatibleSourceError``; otherwise ``B_T`` solves for the
    transverse part of the right side.  ``dET_dt`` defaults to zero.
    """
    g = F.grid
    E_T = g.check_vector(E_T, "E_T")
    dET = g.zeros(3) if dET_dt is None else g.check_vector(dET_dt, "dET_dt")
    gT = grad(g, F.T)
    R = dET / F.c + gT
    B_T = _solve_curl(g, R)
    incompat = float(np.sqrt(np.sum(div(g, R) ** 2) * g.cell_volume))
    # scale by the terms, not their sum, which cancels for compatible data
    r_norm = max(l2_norm(g, dET / F.c), l2_norm(g, gT))
    if strict and incompat > tol * max(r_norm, 1e-300):
        raise IncompatibleSourceError(
            f"curl B_T = (1/c) dE_T/dt + grad T has no solution: the right side has divergence "
            f"of L2 norm {incompat:.3e} (term norm {r_norm:.3e})", incompat)
    return DHResult(F.E - E_T, F.B - B_T, E_T, B_T, incompat)


# -- closed-form scenarios --------------------------------------------------------------


@dataclass(frozen=True)
class SeebeckProfile:
    """``T(x) = T_left + dT (1 + tanh(x / w)) / 2`` on ``[-L/2, L/2)`` with ``n`` samples."""

    delta_T: float
    width: float
    length: float = 40.0
    n: int = 4001
    T_left: float = 0.0

    def sample(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(-self.length / 2, self.length / 2, self.n)
        return x, self.T_left + 0.5 * self.delta_T * (1.0 + np.tanh(x / self.width))


def seebeck_jump(profile: SeebeckProfile, v: float, c: float = 1.0) -> tuple[np.ndarray, np.ndarray, float]:
    """Field seen by a charge crossing a smoothed ``T`` step at speed ``v``.

    In the comoving 1-D model the charge sees ``(1/c) dT/dt = (v/c) dT/dx``;
    integrating ``dE_T/dx`` equal to that gives ``E_T(x) = (v/c)(T(x) - T(-inf))``.
    Returns ``(x, E_T, kick)`` where ``kick`` is the far-side value of
    ``E_T``, i.e. ``(v/c) dT`` for a resolved step.
    """
    if abs(v) >= c:
        raise ValueError(f"|v| = {abs(v)} must be below c = {c}")
    x, T = profile.sample()
    h = x[1] - x[0]
    if profile.width < 4 * h:
        raise ValueError(f"step width {profile.width} is under 4 cells (h = {h:.3g})")
    source = (v / c) * np.gradient(T, h, edge_order=2)
    E_T = np.concatenate([[0.0], np.cumsum(0.5 * (source[1:] + source[:-1]) * h)])
    return x, E_T, float(E_T[-1])


def heated_ball_field(r, R: float, dTdK: float, Kdot: float, c: float = 1.0):
    """Radial ``E_T(r)`` of a ball of radius ``R`` whose temperature rises at ``Kdot``.

    The source ``(1/c)(dT/dK) Kdot`` is uniform inside the ball; by Gauss's
    theorem ``E_T = s r / 3`` inside and ``s R^3 / (3 r^2)`` outside.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    s = dTdK * Kdot / c
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(r <= R, s * r / 3.0, s * R**3 / (3.0 * np.where(r > 0, r, 1.0) ** 2))
    return out if out.ndim else float(out)

