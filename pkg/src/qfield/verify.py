"""Property suites run by ``qfield verify``.

Each suite returns a list of ``Check`` rows: a measured quantity, the
bound it is held to, and whether it passed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import (
    EvolutionConfig, cfl_limit, energy, evolution_rhs, gaussian_T_pulse, pseudo_energy, run,
    source_consistency_residual, state_from_potential, transverse_wave,
)
from .grid import Grid, convergence_order, curl, div, format_order, grad, integrate, l2_norm, laplacian
from .potential import (
    field_paths, fields_from_potential, identity_residual, law_residual, path_discrepancy,
    potential_identity_residual, random_potential,
)
from .quaternion import Quaternion, antisym_product, hamilton_left, hamilton_right, norm, sym_product
from .state import FieldState, Sources
from .thermo import (
    FOUR_PI, ThomsonScenario, heat_balance, seebeck_jump, SeebeckProfile, split_ET, thomson_heat,
    thomson_reversal_experiment,
)

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: str
    passed: bool

    def line(self) -> str:
        v = format_order(self.value) if math.isinf(self.value) else f"{self.value:.4g}"
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<46} {v:>12}  {self.bound}"


def _le(name, value, bound):
    return Check(name, value, f"<= {bound:g}", value <= bound)


def _ge(name, value, bound):
    return Check(name, value, f">= {bound:g}", value >= bound)


# -- algebra -------------------------------------------------------------------------------


def _qdist(a: Quaternion, b: Quaternion) -> float:
    return norm(a - b)


def algebra(samples: int = 100_000, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    draws = rng.normal(size=(samples, 3, 4)).tolist()
    assoc = mult = dual = split = 0.0
    for ra, rb, rc in draws:
        a, b, c = Quaternion(*ra), Quaternion(*rb), Quaternion(*rc)
        na, nb, nc = norm(a), norm(b), norm(c)
        ab = hamilton_right(a, b)
        assoc = max(assoc, _qdist(hamilton_right(ab, c), hamilton_right(a, hamilton_right(b, c))) / (na * nb * nc))
        mult = max(mult, abs(norm(ab) - na * nb) / (na * nb))
        dual = max(dual, _qdist(hamilton_left(a, b), hamilton_right(b, a)) / (na * nb))
        split = max(split, _qdist(sym_product(a, b) + antisym_product(a, b), ab) / (na * nb))
    return [
        _le("associativity (rel)", assoc, 1e-12),
        _le("norm multiplicativity (rel)", mult, 1e-12),
        _le("left/right duality (rel)", dual, 1e-12),
        _le("{a,b} + [a,b] = a->b (rel)", split, 1e-12),
    ]


# -- identities ------------------------------------------------------------------------------


def identities(count: int = 20, n: int = 12, seed: int = 1) -> list[Check]:
    rng = np.random.default_rng(seed)
    g = Grid.cube(n)
    ident = nested = path = 0.0
    law_large = 0
    for _ in range(count):
        P = random_potential(g, rng, dt=0.05, slices=5)
        comb, direct = field_paths(P)
        path = max(path, path_discrepancy(comb, direct))
        F = fields_from_potential(P)
        F.potential_derived = True
        ident = max(ident, identity_residual(F).linf())
        nested = max(nested, potential_identity_residual(P).linf())
        law_large += law_residual(F).l2() > 1e-2
    return [
        _le("field identity residual Linf", ident, 1e-12),
        _le("nested-derivative identity residual Linf", nested, 1e-12),
        _ge(f"law residual L2 > 1e-2 (of {count})", float(law_large), count - 1),
        _le("combinator vs direct path (rel)", path, 1e-13),
    ]


# -- convergence -------------------------------------------------------------------------------


def convergence(resolutions=(16, 32, 64)) -> list[Check]:
    out = []
    for op, case in (("grad", "sin"), ("div", "trig"), ("curl", "trig"), ("laplacian", "sin")):
        order = convergence_order(op, case, resolutions)
        out.append(Check(f"order of {op}", order, "2 +- 0.1", abs(order - 2.0) <= 0.1))
    rng = np.random.default_rng(2)
    g = Grid.cube(16)
    f, v = rng.normal(size=g.shape), rng.normal(size=(3, *g.shape))
    out.append(_le("curl(grad f) Linf", float(np.max(np.abs(curl(g, grad(g, f))))), 1e-10))
    out.append(_le("div(curl v) Linf", float(np.max(np.abs(div(g, curl(g, v))))), 1e-10))
    return out


# -- conservation -------------------------------------------------------------------------------


def _q_drift(F0: FieldState, dt: float, steps: int) -> float:
    cfg = EvolutionConfig(dt=dt, steps=steps, cfl_safety=1.0)
    res = run(F0, Sources.zero(F0.grid), cfg)
    q0 = pseudo_energy(F0)
    return max(abs(r.pseudo_energy_q - q0) for r in res.rows) / energy(F0)


def _energy_and_source_errors(F0: FieldState, refine: int, t_mid: float = 0.1) -> tuple[float, float]:
    g = F0.grid
    dt = 0.25 * cfl_limit(g, F0.c) / refine
    steps = round(t_mid / dt)
    res = run(F0, Sources.zero(g), EvolutionConfig(dt=dt, steps=steps + 1, cfl_safety=1.0),
              keep_history=True)
    prev, cur, nxt = (s for _, s in res.snapshots[steps - 1:steps + 2])
    dU = (energy(nxt) - energy(prev)) / (2 * dt)
    pred = integrate(g, cur.T * evolution_rhs(cur, Sources.zero(g)).dT) / (2 * math.pi)
    src = source_consistency_residual([prev, cur, nxt])
    return abs(dU - pred) / abs(pred), l2_norm(g, src) / l2_norm(g, laplacian(g, cur.T))


def conservation() -> list[Check]:
    out = []
    pulse = gaussian_T_pulse(Grid.cube(64, dims=1), width=0.08)
    pot = state_from_potential(random_potential(Grid.cube(16), np.random.default_rng(7), kmax=1,
                                                dt=0.01, slices=3))
    for label, F0, t_end in (("1-D T pulse", pulse, 0.3), ("3-D potential", pot, 0.2)):
        steps = math.ceil(t_end / (0.5 * cfl_limit(F0.grid, F0.c)))
        a = _q_drift(F0, t_end / steps, steps)
        b = _q_drift(F0, t_end / (2 * steps), 2 * steps)
        out.append(_le(f"Q drift / U0, {label}", a, 1e-6))
        # at least dt^4 convergence within a factor 2; RK4 on this skew system gives ~dt^5
        out.append(_ge(f"Q drift ratio under dt/2, {label}", a / b, 8.0))

    # plain energy follows dU/dt = (1/2 pi) integral T dT/dt; both diagnostics
    # use centered time differences, so their error must fall as dt^2
    errs_u, errs_s = [], []
    for refine in (1, 2):
        u, s_ = _energy_and_source_errors(pulse, refine)
        errs_u.append(u)
        errs_s.append(s_)
    out.append(_le("dU/dt vs (1/2pi) int T dT/dt (rel)", errs_u[1], 1e-2))
    out.append(Check("  ... order under dt/2", math.log2(errs_u[0] / errs_u[1]), "2 +- 0.2",
                     abs(math.log2(errs_u[0] / errs_u[1]) - 2) <= 0.2))
    out.append(_le("source consistency / |lap T| , vacuum pulse", errs_s[1], 1e-2))
    out.append(Check("  ... order under dt/2", math.log2(errs_s[0] / errs_s[1]), "2 +- 0.2",
                     abs(math.log2(errs_s[0] / errs_s[1]) - 2) <= 0.2))

    # transverse sector: T stays zero, div B stays zero
    g = Grid.cube(64, dims=1)
    tw = transverse_wave(g)
    steps = math.ceil(1.0 / (0.5 * cfl_limit(g, 1.0)))
    res = run(tw, Sources.zero(g), EvolutionConfig(dt=1.0 / steps, steps=steps))
    out.append(_le("max|T|, transverse wave", max(r.maxT for r in res.rows), 1e-10))
    res = run(pot, Sources.zero(pot.grid), EvolutionConfig(dt=0.2 / 12, steps=12))
    out.append(_le("div B L2, 3-D potential run", max(r.divB_l2 for r in res.rows), 1e-10))
    return out


# -- thermo ------------------------------------------------------------------------------------


def _two_source_error(n: int) -> float:
    # E = E_T + E_rho with dT/dt = a sin(kx) and rho = b cos(ky)
    g = Grid.cube(n, dims=2)
    x, y, _ = g.coords()
    k = 2 * math.pi
    a, b = 0.7, 0.3
    E = g.zeros(3)
    E[0] = -(a / k) * np.cos(k * x)
    E[1] = (FOUR_PI * b / k) * np.sin(k * y)
    F = FieldState(g, g.zeros(), E, g.zeros(3), dT_dt=a * np.sin(k * x))
    E_T = split_ET(F)
    return l2_norm(g, div(g, F.E - E_T) - FOUR_PI * b * np.cos(k * y))


def thermo() -> list[Check]:
    out = []
    J, gK = np.array([3.0, 0, 0]), np.array([0.2, 0, 0])
    t = heat_balance(J, 2.0, 0.5, gK, 0.5 * gK + FOUR_PI * J, np.zeros(3))
    out.append(_le("heat balance closure (rel)", abs(t.residual) / t.scale, 1e-12))
    h_exact = -1.0 / (16 * math.pi)
    h = thomson_reversal_experiment(ThomsonScenario((3.0, 0, 0), (0.2, 0, 0)), 2.0, 0.5)
    out.append(_le("h_T from current reversal (rel)", abs(h / h_exact - 1), 1e-12))
    th = thomson_heat(J, gK, 2.0, 0.5)
    out.append(_le("dQ/dt vs 4.5 + 0.6/(16 pi)", abs(th.dQ_dt - (4.5 + 0.6 / (16 * math.pi))), 1e-14))
    out.append(_le("dQ/dt vs joule + thomson", abs(th.dQ_dt - (t.joule + t.thomson)), 1e-14))

    g = Grid.cube(32, dims=2)
    x, y, _ = g.coords()
    rng = np.random.default_rng(3)
    src = np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y) + 0.1 * rng.normal() * np.cos(2 * np.pi * y)
    F = FieldState(g, g.zeros(), g.zeros(3), g.zeros(3), dT_dt=src)
    E_T = split_ET(F)
    out.append(_le("div E_T - (1/c) dT/dt Linf", float(np.max(np.abs(div(g, E_T) - src))), 1e-10))
    out.append(_le("curl E_T Linf", float(np.max(np.abs(curl(g, E_T)))), 1e-10))
    e1, e2 = _two_source_error(32), _two_source_error(64)
    out.append(Check("div(E - E_T) - 4 pi rho order", math.log2(e1 / e2), "2 +- 0.2",
                     abs(math.log2(e1 / e2) - 2) <= 0.2))
    _, _, kick = seebeck_jump(SeebeckProfile(2.0, 1.0), 0.1)
    out.append(_le("Seebeck kick vs (v/c) dT", abs(kick - 0.2), 1e-9))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "algebra": algebra,
    "identities": identities,
    "convergence": convergence,
    "conservation": conservation,
    "thermo": thermo,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return SUITES[name]()
