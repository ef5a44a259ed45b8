"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines are printed uncaptured) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from qfield.cli import build_sources, initial_state, main
from qfield.config import load_config
from qfield.dynamics import (
    EvolutionConfig, cfl_limit, energy, fit_growth_rate, pseudo_energy, run, scalar_mode,
    scalar_mode_amplitude, source_consistency_residual, transverse_wave,
)
from qfield.grid import Grid, curl, div, l2_norm, laplacian
from qfield.potential import (
    field_paths, fields_from_potential, identity_residual, law_residual, path_discrepancy,
    potential_identity_residual, random_potential,
)
from qfield.quaternion import Quaternion, antisym_product, hamilton_left, hamilton_right, norm, sym_product
from qfield.state import FieldState, Sources
from qfield.thermo import (
    ThomsonScenario, heat_balance, split_ET, thomson_coefficient, thomson_heat, thomson_reversal_experiment,
)

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = sorted((ROOT / "configs").glob("*.json"))
FOUR_PI = 4 * math.pi


def report(n: int, title: str, passed: bool, detail: str, capsys=None) -> None:
    line = f"{'PASS' if passed else 'FAIL'}  criterion {n:>2}  {title}: {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert passed, line


# -- measurements -----------------------------------------------------------------------------


def c1_algebra(samples=100_000, seed=2024):
    rng = np.random.default_rng(seed)
    worst = dict(assoc=0.0, mult=0.0, dual=0.0, split=0.0)
    for ra, rb, rc in rng.normal(size=(samples, 3, 4)).tolist():
        a, b, c = Quaternion(*ra), Quaternion(*rb), Quaternion(*rc)
        na, nb, nc = norm(a), norm(b), norm(c)
        ab = hamilton_right(a, b)
        worst["assoc"] = max(worst["assoc"], norm(hamilton_right(ab, c) - hamilton_right(a, hamilton_right(b, c)))
                             / (na * nb * nc))
        worst["mult"] = max(worst["mult"], abs(norm(ab) - na * nb) / (na * nb))
        worst["dual"] = max(worst["dual"], norm(hamilton_left(a, b) - hamilton_right(b, a)) / (na * nb))
        worst["split"] = max(worst["split"], norm(sym_product(a, b) + antisym_product(a, b) - ab) / (na * nb))
    return all(v <= 1e-12 for v in worst.values()), ", ".join(f"{k} {v:.2e}" for k, v in worst.items())


def _potentials(count=20, seed=99):
    rng = np.random.default_rng(seed)
    g = Grid.cube(12)
    return [random_potential(g, rng, dt=0.05, slices=5) for _ in range(count)]


def c2_identity_vs_law():
    ident = nested = 0.0
    law_big = 0
    pots = _potentials()
    for P in pots:
        F = fields_from_potential(P)
        ident = max(ident, identity_residual(F).linf())
        nested = max(nested, potential_identity_residual(P).linf())
        law_big += law_residual(F).l2() > 1e-2
    ok = ident <= 1e-12 and nested <= 1e-12 and law_big >= 19
    return ok, (f"identity Linf {ident:.2e}, nested identity Linf {nested:.2e}, "
                f"law L2 > 1e-2 on {law_big}/{len(pots)}")


def c3_paths():
    worst = max(path_discrepancy(*field_paths(P)) for P in _potentials(seed=5))
    return worst <= 1e-13, f"max relative path difference {worst:.2e} over 20 potentials"


def _transverse(n):
    g = Grid.cube(n, dims=1)
    steps = math.ceil(1.0 / (0.5 * cfl_limit(g, 1.0)))
    res = run(transverse_wave(g), Sources.zero(g), EvolutionConfig(dt=1.0 / steps, steps=steps))
    exact = transverse_wave(g, t=res.final.t)
    err = l2_norm(g, res.final.E - exact.E) + l2_norm(g, res.final.B - exact.B)
    return err / (l2_norm(g, exact.E) + l2_norm(g, exact.B)), max(r.maxT for r in res.rows)


def c4_transverse():
    e128, t128 = _transverse(128)
    e256, t256 = _transverse(256)
    ratio = e128 / e256
    ok = e128 < 0.02 and abs(ratio - 4) <= 0.5 and max(t128, t256) <= 1e-10
    return ok, f"L2 error {e128:.3e} at N=128, ratio {ratio:.3f} under N->2N, max|T| {max(t128, t256):.1e}"


def c5_scalar_growth():
    cfg = load_config(ROOT / "configs" / "scalar_mode.json")
    g = cfg.grid.build()
    p = cfg.scenario.params
    k = 2 * math.pi * p.mode / g.lengths[0]
    ev = EvolutionConfig(cfg.dt, cfg.steps, spectral_filter=cfg.spectral_filter)
    res = run(scalar_mode(g, p.epsilon, p.mode, cfg.c), Sources.zero(g), ev, keep_history=True)
    t = np.array([s.t for _, s in res.snapshots])
    amp = np.array([scalar_mode_amplitude(s, p.mode) for _, s in res.snapshots])
    mismatch = float(np.max(np.abs(amp / (p.epsilon * np.cosh(cfg.c * k * t)) - 1)))
    rate = fit_growth_rate(t[1:], amp[1:], p.epsilon) / (cfg.c * k)
    ok = mismatch <= 0.01 and abs(rate - 1) <= 0.02 and cfg.c * k * t[-1] >= math.pi - 1e-9
    return ok, (f"N={g.nx}, max |amp/(eps cosh ckt) - 1| = {mismatch:.3e} up to ckt = {cfg.c * k * t[-1]:.4f}, "
                f"fitted rate / c|k| = {rate:.5f}")


def _q_drift(cfg, refine):
    g = cfg.grid.build()
    F0 = initial_state(cfg, g)
    ev = EvolutionConfig(cfg.dt / refine, cfg.steps * refine, cfg.scheme, cfg.cfl_safety, cfg.spectral_filter)
    res = run(F0, build_sources(cfg, g), ev)
    u0 = energy(F0)
    q0 = pseudo_energy(F0)
    return max(abs(r.pseudo_energy_q - q0) for r in res.rows) / u0 if u0 else 0.0


def c6_pseudo_energy():
    worst, ratios = 0.0, {}
    for p in CONFIGS:
        cfg = load_config(p)
        if not cfg.is_dynamic or cfg.sources is not None:
            continue
        a, b = _q_drift(cfg, 1), _q_drift(cfg, 2)
        worst = max(worst, a)
        if b > 0:
            ratios[p.stem] = a / b
    # dt^4 within a factor 2: the halving ratio sits in [16/2, 16*2]
    in_band = {k: 8.0 <= r <= 32.0 for k, r in ratios.items()}
    ok = worst <= 1e-6 and all(in_band.values())
    detail = ", ".join(f"{k} {r:.3f} (p={math.log2(r):.3f})" for k, r in ratios.items())
    return ok, f"max drift/U0 {worst:.2e}; halving ratio vs band [8, 32]: {detail}"


def _consistency_at_mid(cfg, refine):
    g = cfg.grid.build()
    F0, S = initial_state(cfg, g), build_sources(cfg, g)
    ev = EvolutionConfig(cfg.dt / refine, cfg.steps * refine, cfg.scheme, cfg.cfl_safety, cfg.spectral_filter)
    res = run(F0, S, ev, keep_history=True)
    mid = (cfg.steps // 2) * refine
    states = [s for _, s in res.snapshots[mid - 1:mid + 2]]
    src = None if cfg.source_mode == "identified" else S
    return l2_norm(g, source_consistency_residual(states, src)), max(r.divB_l2 for r in res.rows)


def c7_divb_and_consistency():
    div_worst, parts, ok = 0.0, [], True
    for p in CONFIGS:
        cfg = load_config(p)
        if not cfg.is_dynamic:
            continue
        (a, d1), (b, d2) = _consistency_at_mid(cfg, 1), _consistency_at_mid(cfg, 2)
        div_worst = max(div_worst, d1, d2)
        if a <= 1e-10:
            parts.append(f"{p.stem} residual {a:.1e}")
            continue
        order = math.log2(a / b)
        ok &= abs(order - 2) <= 0.3
        parts.append(f"{p.stem} order {order:.3f}")
    ok &= div_worst <= 1e-10
    return ok, f"max div B L2 {div_worst:.1e}; " + ", ".join(parts)


def c8_thermo():
    J, gK = np.array([3.0, 0, 0]), np.array([0.2, 0, 0])
    sigma, dTdK = 2.0, 0.5
    t = heat_balance(J, sigma, dTdK, gK, dTdK * gK + FOUR_PI * J, np.zeros(3))
    closure = abs(t.residual) / t.scale
    h = thomson_reversal_experiment(ThomsonScenario(tuple(J), tuple(gK)), sigma, dTdK)
    h_exact = -1.0 / (4 * math.pi * sigma) * dTdK
    rev = abs(h / h_exact - 1)
    th = thomson_heat(J, gK, sigma, dTdK)
    worked = round(th.dQ_dt, 7) == 4.5119366 and round(thomson_coefficient(sigma, dTdK), 7) == -0.0198944
    ok = closure <= 1e-12 and rev <= 1e-12 and worked
    return ok, (f"closure {closure:.1e}, reversal rel error {rev:.1e}, "
                f"dQ/dt {th.dQ_dt:.7f}, h_T {thomson_coefficient(sigma, dTdK):.7f}")


def _two_source(n):
    g = Grid.cube(n, dims=2)
    x, y, _ = g.coords()
    k, a, b = 2 * math.pi, 0.7, 0.3
    E = g.zeros(3)
    E[0] = -(a / k) * np.cos(k * x)
    E[1] = (FOUR_PI * b / k) * np.sin(k * y)
    F = FieldState(g, g.zeros(), E, g.zeros(3), dT_dt=a * np.sin(k * x))
    return l2_norm(g, div(g, F.E - split_ET(F)) - FOUR_PI * b * np.cos(k * y))


def c9_split():
    g = Grid(24, 20, 16, 1 / 24, 1 / 20, 1 / 16)
    x, y, z = g.coords()
    src = np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y) + 0.3 * np.sin(4 * np.pi * z)
    F = FieldState(g, g.zeros(), g.zeros(3), g.zeros(3), c=1.5, dT_dt=src)
    E_T = split_ET(F)
    d = float(np.max(np.abs(div(g, E_T) - src / F.c)))
    cu = float(np.max(np.abs(curl(g, E_T))))
    e = [_two_source(n) for n in (16, 32, 64)]
    orders = [math.log2(e[0] / e[1]), math.log2(e[1] / e[2])]
    ok = d <= 1e-10 and cu <= 1e-10 and all(abs(o - 2) <= 0.2 for o in orders)
    return ok, f"div residual {d:.1e}, curl E_T {cu:.1e}, rho recovery orders {orders[0]:.3f}, {orders[1]:.3f}"


def _outputs(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def c10_determinism():
    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        for p in CONFIGS:
            outs = []
            for w in (1, 4):
                d = Path(tmp) / f"{p.stem}_{w}"
                if main(["--quiet", "--workers", str(w), "run", "--config", str(p), "--output-dir", str(d)]) != 0:
                    bad.append(f"{p.stem} exit")
                outs.append(_outputs(d))
            d = Path(tmp) / f"{p.stem}_py"
            env = dict(os.environ, QFIELD_BACKEND="python")
            subprocess.run([sys.executable, "-m", "qfield", "--quiet", "run", "--config", str(p),
                            "--output-dir", str(d)], env=env, check=True)
            outs.append(_outputs(d))
            if not (outs[0] and outs[0] == outs[1] == outs[2]):
                bad.append(p.stem)
    files = "CSV and snapshot files"
    return not bad, (f"{len(CONFIGS)} configs, {files} identical for workers 1/4 and the NumPy backend"
                     if not bad else f"mismatch in {', '.join(bad)}")


CRITERIA = [
    (1, "algebra suite", c1_algebra),
    (2, "identity vs law contrast", c2_identity_vs_law),
    (3, "path equivalence", c3_paths),
    (4, "classical reduction", c4_transverse),
    (5, "scalar-sector growth", c5_scalar_growth),
    (6, "pseudo-energy conservation", c6_pseudo_energy),
    (7, "div B and source consistency", c7_divb_and_consistency),
    (8, "thermo closure", c8_thermo),
    (9, "E_T split", c9_split),
    (10, "CLI determinism", c10_determinism),
]


@pytest.mark.parametrize("n, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, title, fn, capsys):
    ok, detail = fn()
    report(n, title, ok, detail, capsys)


if __name__ == "__main__":
    failed = 0
    for n, title, fn in CRITERIA:
        ok, detail = fn()
        print(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}  {title}: {detail}", flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
