"""``qfield`` command line: verify, run, inspect.

Exit codes: 0 success, 1 failed assertion or malformed input (config,
snapshot), 2 runtime abort (non-finite state, unexpected error).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import _backend
from .config import ConfigError, ScenarioConfig, load_config
from .dynamics import (
    DiagnosticsRow, EvolutionConfig, NonFiniteError, gaussian_T_pulse, run, scalar_mode,
    scalar_mode_amplitude, state_from_potential, transverse_wave, zero_state,
)
from .grid import Grid, l2_norm
from .potential import plane_wave_potential, random_potential
from .snapshot import Snapshot, SnapshotError, read_snapshot, write_snapshot
from .state import FieldState, Sources
from .thermo import (
    ProbeCharge, SeebeckProfile, ThomsonScenario, heat_balance, heated_ball_field, seebeck_jump,
    temporal_work, thomson_coefficient, thomson_heat, thomson_reversal_experiment,
)
from .verify import SUITES, run_suite

log = logging.getLogger("qfield")

EXIT_OK, EXIT_FAIL, EXIT_ABORT = 0, 1, 2


def fmt(x) -> str:
    """17 significant digits: re-parses to the identical double."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


# -- run --------------------------------------------------------------------------------------


def initial_state(cfg: ScenarioConfig, grid: Grid) -> FieldState:
    p, c = cfg.scenario.params, cfg.c
    name = cfg.scenario.name
    if name == "zero":
        return zero_state(grid, c)
    if name == "transverse_wave":
        return transverse_wave(grid, p.amplitude, p.mode, c)
    if name == "scalar_mode":
        return scalar_mode(grid, p.epsilon, p.mode, c)
    if name == "gaussian_T_pulse":
        return gaussian_T_pulse(grid, p.amplitude, p.width, p.center, c)
    if name == "from_potential":
        if p.kind == "plane_wave":
            P = plane_wave_potential(grid, p.amplitude, p.mode, c, dt=p.potential_dt, slices=3)
        else:
            rng = np.random.default_rng(cfg.seed)
            P = random_potential(grid, rng, modes=p.modes, kmax=p.kmax, dt=p.potential_dt, slices=3, c=c)
        return state_from_potential(P)
    raise ConfigError(f"scenario.name: {name!r} is not a field-evolution scenario")


def build_sources(cfg: ScenarioConfig, grid: Grid) -> Sources:
    if cfg.source_mode == "identified":
        return Sources.identified()
    if cfg.sources is None:
        return Sources.zero(grid)
    x, _, _ = grid.coords()
    k = 2.0 * math.pi * cfg.sources.rho_mode / grid.lengths[0]
    return Sources.explicit(grid, rho=cfg.sources.rho_amplitude * np.cos(k * x))


def _resolve(path: str, out_dir: Path | None) -> Path:
    p = Path(path)
    return out_dir / p.name if out_dir is not None else p


def _snapshot_target(template: Path, step: int) -> Path:
    return Path(str(template).format(step=step)) if "{step}" in str(template) else template


def _report_dynamic(cfg: ScenarioConfig, F0: FieldState, final: FieldState) -> None:
    name, p = cfg.scenario.name, cfg.scenario.params
    if name == "transverse_wave":
        exact = transverse_wave(F0.grid, p.amplitude, p.mode, cfg.c, t=final.t)
        err = l2_norm(F0.grid, final.E - exact.E) + l2_norm(F0.grid, final.B - exact.B)
        ref = l2_norm(F0.grid, exact.E) + l2_norm(F0.grid, exact.B)
        log.info("transverse wave: relative L2 error at t=%s is %.4e", fmt(final.t), err / ref)
    elif name == "scalar_mode":
        k = 2.0 * math.pi * p.mode / F0.grid.lengths[0]
        amp = scalar_mode_amplitude(final, p.mode)
        want = p.epsilon * math.cosh(cfg.c * k * final.t)
        log.info("scalar mode: amplitude %.6e vs eps cosh(ckt) %.6e (rel %.3e)", amp, want, amp / want - 1)


def cmd_run_dynamic(cfg: ScenarioConfig, out_dir: Path | None) -> int:
    grid = cfg.grid.build()
    F0 = initial_state(cfg, grid)
    S = build_sources(cfg, grid)
    ev = EvolutionConfig(cfg.dt, cfg.steps, cfg.scheme, cfg.cfl_safety, cfg.spectral_filter)
    csv_path = _resolve(cfg.output.csv_path, out_dir)
    snap_tpl = _resolve(cfg.output.snapshot_path, out_dir) if cfg.output.snapshot_path else None
    every = cfg.output.snapshot_every or (cfg.steps if snap_tpl else None)
    log.info("backend=%s threads=%d grid=%s dt=%s steps=%d filter=%s sources=%s",
             _backend.name, _backend.kernels.get_num_threads(), grid.shape, fmt(cfg.dt), cfg.steps,
             cfg.spectral_filter if cfg.spectral_filter is not None else "off", cfg.source_mode)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(DiagnosticsRow.FIELDS) + "\n")

        def write_row(row: DiagnosticsRow) -> None:
            fh.write(",".join(fmt(v) for v in row.values()) + "\n")
            fh.flush()

        try:
            result = run(F0, S, ev, snapshot_every=every, on_row=write_row)
        except NonFiniteError as exc:
            log.error("non-finite state at step %d; %d rows kept in %s", exc.step, len(exc.rows), csv_path)
            return EXIT_ABORT
    if snap_tpl is not None:
        for n, state in result.snapshots:
            target = _snapshot_target(snap_tpl, n)
            target.parent.mkdir(parents=True, exist_ok=True)
            write_snapshot(target, Snapshot.from_state(state, S if cfg.sources is not None else None))
    _report_dynamic(cfg, F0, result.final)
    log.info("wrote %d rows to %s", len(result.rows), csv_path)
    return EXIT_OK


def thermo_quantities(cfg: ScenarioConfig) -> list[tuple[str, float]]:
    name, p, c, m = cfg.scenario.name, cfg.scenario.params, cfg.c, cfg.material
    if name == "heat_balance":
        J, gK, dE = (np.asarray(v, dtype=float) for v in (p.J, p.gradK, p.dEdt))
        # curl B manufactured so the Ampere law holds at the point
        curlB = (dE / c + m.dTdK * gK) + (4.0 * math.pi / c) * J
        t = heat_balance(J, m.sigma, m.dTdK, gK, curlB, dE, c)
        return [("joule", t.joule), ("thomson", t.thomson), ("curl_term", t.curl_term),
                ("displacement_term", t.displacement_term), ("residual", t.residual)]
    if name == "thomson_reversal":
        th = thomson_heat(p.J, p.gradK, m.sigma, m.dTdK, c)
        est = thomson_reversal_experiment(ThomsonScenario(p.J, p.gradK), m.sigma, m.dTdK, c)
        return [("dQ_dt", th.dQ_dt), ("h_T", thomson_coefficient(m.sigma, m.dTdK, c)), ("h_T_reversal", est)]
    if name == "seebeck_jump":
        _, _, kick = seebeck_jump(SeebeckProfile(p.delta_T, p.width, p.length, p.n), p.v, c)
        return [("kick", kick), ("expected", p.v / c * p.delta_T)]
    if name == "heated_ball":
        E = heated_ball_field(np.asarray(p.r), p.R, m.dTdK, p.Kdot, c)
        return [(f"E_T(r={fmt(r)})", e) for r, e in zip(p.r, np.atleast_1d(E))]
    if name == "temporal_work":
        return [("W", temporal_work(ProbeCharge(p.q, v=p.v), p.T, p.dt, c))]
    raise ConfigError(f"scenario.name: {name!r} is not a thermo scenario")


def cmd_run_thermo(cfg: ScenarioConfig, out_dir: Path | None) -> int:
    rows = thermo_quantities(cfg)
    csv_path = _resolve(cfg.output.csv_path, out_dir)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="") as fh:
        fh.write("quantity,value\n")
        for k, v in rows:
            fh.write(f"{k},{fmt(v)}\n")
    for k, v in rows:
        log.info("%s = %s", k, fmt(v))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.output_dir) if args.output_dir else None
    if cfg.is_dynamic:
        return cmd_run_dynamic(cfg, out_dir)
    return cmd_run_thermo(cfg, out_dir)


# -- verify / inspect ------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = []
    for name in names:
        checks = run_suite(name)
        if not args.quiet:
            print(f"[{name}]")
            for ch in checks:
                print("  " + ch.line())
        failed += [f"{name}: {ch.name}" for ch in checks if not ch.passed]
    for f in failed:
        print(f"FAILED {f}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_inspect(args) -> int:
    snap = read_snapshot(args.path)
    nx, ny, nz = snap.shape
    print(f"dims {nx} x {ny} x {nz}")
    print(f"fields {' '.join(snap.fields)}")
    for name, arr in snap.fields.items():
        comps = [arr] if arr.ndim == 3 else list(arr)
        labels = [name] if arr.ndim == 3 else [f"{name}{ax}" for ax in "xyz"]
        for lab, a in zip(labels, comps):
            l2 = math.sqrt(float(np.sum(np.square(a))))
            print(f"  {lab:<4} min {fmt(a.min()):>24}  max {fmt(a.max()):>24}  l2 {fmt(l2):>24}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qfield", description=__doc__.splitlines()[0])
    ap.add_argument("--quiet", action="store_true", help="only errors on stderr")
    ap.add_argument("--workers", type=int, default=None, help="threads for the compiled kernels")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, choices=[*SUITES, "all"])
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("--config", required=True, help="JSON scenario file")
    r.add_argument("--output-dir", default=None, help="write outputs here (file names from the config)")
    r.set_defaults(func=cmd_run)

    i = sub.add_parser("inspect", help="summarize a QMX1 snapshot")
    i.add_argument("path")
    i.set_defaults(func=cmd_inspect)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    # global flags are accepted after the subcommand too
    args, rest = ap.parse_known_args(argv)
    if rest:
        extra = argparse.ArgumentParser(add_help=False)
        extra.add_argument("--quiet", action="store_true")
        extra.add_argument("--workers", type=int)
        more, unknown = extra.parse_known_args(rest)
        if unknown:
            ap.error(f"unrecognized arguments: {' '.join(unknown)}")
        args.quiet = args.quiet or more.quiet
        args.workers = more.workers if more.workers is not None else args.workers
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    if args.workers is not None:
        if args.workers < 1:
            ap.error("--workers must be >= 1")
        _backend.set_num_threads(args.workers)
    try:
        return args.func(args)
    except (ConfigError, SnapshotError) as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    except FileNotFoundError as exc:
        log.error("%s: %s", exc.strerror, exc.filename)
        return EXIT_FAIL
    except Exception as exc:  # runtime abort
        log.error("aborted: %s: %s", type(exc).__name__, exc)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
