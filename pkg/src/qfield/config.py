"""JSON scenario configuration.

Every key is validated before any computation starts; unknown keys are
rejected.  Randomized initial data draws from
``numpy.random.default_rng(seed)`` (PCG64 seeded through SeedSequence), so a
config plus its seed fixes the run completely.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .dynamics import cfl_limit
from .grid import Grid

__all__ = ["ScenarioConfig", "ConfigError", "load_config", "DYNAMIC_SCENARIOS", "THERMO_SCENARIOS"]

DYNAMIC_SCENARIOS = ("zero", "transverse_wave", "scalar_mode", "gaussian_T_pulse", "from_potential")
THERMO_SCENARIOS = ("heat_balance", "thomson_reversal", "seebeck_jump", "heated_ball", "temporal_work")

Vec3 = tuple[float, float, float]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Strict):
    nx: int = Field(ge=1)
    ny: int = Field(1, ge=1)
    nz: int = Field(1, ge=1)
    dx: float = Field(1.0, gt=0, allow_inf_nan=False)
    dy: float = Field(1.0, gt=0, allow_inf_nan=False)
    dz: float = Field(1.0, gt=0, allow_inf_nan=False)

    def build(self) -> Grid:
        return Grid(self.nx, self.ny, self.nz, self.dx, self.dy, self.dz)


# -- scenario parameter blocks -------------------------------------------------------------


class ZeroParams(_Strict):
    pass


class TransverseWaveParams(_Strict):
    amplitude: float = Field(1.0, allow_inf_nan=False)
    mode: int = Field(1, ge=1)


class ScalarModeParams(_Strict):
    epsilon: float = Field(1e-3, gt=0, allow_inf_nan=False)
    mode: int = Field(1, ge=1)


class GaussianPulseParams(_Strict):
    amplitude: float = Field(1.0, allow_inf_nan=False)
    width: float = Field(0.1, gt=0, allow_inf_nan=False)
    center: Optional[Vec3] = None


class FromPotentialParams(_Strict):
    kind: Literal["random", "plane_wave"] = "random"
    modes: int = Field(3, ge=1)
    kmax: int = Field(2, ge=1)
    amplitude: float = Field(1.0, allow_inf_nan=False)
    mode: int = Field(1, ge=1)
    potential_dt: float = Field(0.01, gt=0, allow_inf_nan=False)


class HeatBalanceParams(_Strict):
    J: Vec3
    gradK: Vec3
    dEdt: Vec3 = (0.0, 0.0, 0.0)


class ThomsonReversalParams(_Strict):
    J: Vec3
    gradK: Vec3


class SeebeckParams(_Strict):
    delta_T: float = Field(allow_inf_nan=False)
    width: float = Field(gt=0, allow_inf_nan=False)
    v: float = Field(allow_inf_nan=False)
    length: float = Field(40.0, gt=0, allow_inf_nan=False)
    n: int = Field(4001, ge=3)


class HeatedBallParams(_Strict):
    R: float = Field(gt=0, allow_inf_nan=False)
    Kdot: float = Field(allow_inf_nan=False)
    r: list[float] = Field(min_length=1)


class TemporalWorkParams(_Strict):
    q: float = Field(allow_inf_nan=False)
    T: list[float] = Field(min_length=1)
    dt: float = Field(gt=0, allow_inf_nan=False)
    v: Vec3 = (0.0, 0.0, 0.0)


def _scenario(name: str, params: type) -> type:
    return type(
        f"{params.__name__[:-6]}Scenario",
        (_Strict,),
        {"__annotations__": {"name": Literal[name], "params": params},
         "params": Field(default_factory=params)},
    )


ScenarioSpec = Annotated[
    Union[
        _scenario("zero", ZeroParams),
        _scenario("transverse_wave", TransverseWaveParams),
        _scenario("scalar_mode", ScalarModeParams),
        _scenario("gaussian_T_pulse", GaussianPulseParams),
        _scenario("from_potential", FromPotentialParams),
        _scenario("heat_balance", HeatBalanceParams),
        _scenario("thomson_reversal", ThomsonReversalParams),
        _scenario("seebeck_jump", SeebeckParams),
        _scenario("heated_ball", HeatedBallParams),
        _scenario("temporal_work", TemporalWorkParams),
    ],
    Field(discriminator="name"),
]


class MaterialConfig(_Strict):
    sigma: float = Field(gt=0, allow_inf_nan=False)
    dTdK: float = Field(allow_inf_nan=False)


class SourcesConfig(_Strict):
    """Static explicit charge ``rho = a cos(k x)`` along x; ``J = 0``."""

    rho_amplitude: float = Field(0.0, allow_inf_nan=False)
    rho_mode: int = Field(1, ge=1)


class OutputConfig(_Strict):
    csv_path: str
    snapshot_path: Optional[str] = None
    snapshot_every: Optional[int] = Field(None, ge=1)


class ScenarioConfig(_Strict):
    grid: GridConfig = GridConfig(nx=32)
    c: float = Field(1.0, gt=0, allow_inf_nan=False)
    dt: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    steps: Optional[int] = Field(None, ge=1)
    scheme: Literal["RK4"] = "RK4"
    cfl_safety: float = Field(0.5, gt=0, le=1, allow_inf_nan=False)
    spectral_filter: Optional[float] = Field(None, gt=0, le=1, allow_inf_nan=False)
    scenario: ScenarioSpec
    source_mode: Literal["explicit", "identified"] = "explicit"
    sources: Optional[SourcesConfig] = None
    material: Optional[MaterialConfig] = None
    seed: int = Field(0, ge=0, lt=2**64)
    output: OutputConfig

    @property
    def is_dynamic(self) -> bool:
        return self.scenario.name in DYNAMIC_SCENARIOS

    @model_validator(mode="after")
    def _cross_checks(self):
        name = self.scenario.name
        if self.is_dynamic:
            if self.dt is None or self.steps is None:
                raise ValueError(f"scenario {name!r} needs dt and steps")
            try:
                grid = self.grid.build()
            except ValueError as exc:
                raise ValueError(f"grid: {exc}") from None
            limit = self.cfl_safety * cfl_limit(grid, self.c)
            if self.dt > limit:
                raise ValueError(f"dt: {self.dt} exceeds cfl_safety * dt_max = {limit} (CFL)")
            if self.sources is not None and self.source_mode == "identified":
                raise ValueError("sources: identified mode reads sources off T and takes no arrays")
            if self.output.snapshot_every is not None and self.output.snapshot_path is None:
                raise ValueError("output.snapshot_every needs output.snapshot_path")
            if name == "from_potential" and self.scenario.params.kind == "plane_wave" and not grid.active[0]:
                raise ValueError("scenario.params: plane wave needs an active x axis")
        else:
            if name in ("heat_balance", "thomson_reversal", "heated_ball") and self.material is None:
                raise ValueError(f"scenario {name!r} needs material")
            if name in ("seebeck_jump", "temporal_work"):
                v = self.scenario.params.v
                speed = abs(v) if isinstance(v, float) else math.hypot(*v)
                if speed >= self.c:
                    raise ValueError(f"scenario.params.v: speed {speed} must be below c = {self.c}")
            if name == "seebeck_jump":
                p = self.scenario.params
                h = p.length / (p.n - 1)
                if p.width < 4 * h:
                    raise ValueError(f"scenario.params.width: {p.width} is under 4 cells (h = {h:.3g})")
            if name == "thomson_reversal":
                p = self.scenario.params
                if sum(a * b for a, b in zip(p.J, p.gradK)) == 0.0:
                    raise ValueError("scenario.params: J . gradK = 0, Thomson heat cannot be isolated")
        return self


def _format(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        msg = e["msg"].removeprefix("Value error, ")
        lines.append(msg if loc == "<root>" else f"{loc}: {msg}")
    return "; ".join(lines)


def parse_config(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format(exc)) from None


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(data)
