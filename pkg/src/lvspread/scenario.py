"""Scenario files: YAML in, validated :class:`Scenario` out, with field-path diagnostics."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ScenarioError, ValidationError
from .fronts import Numerics1D, Params
from .geometry.shapes import SupportSpec, spec_from_dict
from .simulator import Grid, SimScenario, rasterize_support

SIZING_MARGIN = 20.0

_TOP_KEYS = {"name", "params", "U", "V", "rho", "alpha", "grid", "horizon", "snapshot_times",
             "measurement", "c_uv", "front_speed", "seed"}


@dataclass(frozen=True)
class MeasurementConfig:
    directions: int = 16
    level: float = 0.5
    window: float = 0.5
    tol: float = 0.10


@dataclass(frozen=True)
class CuvValue:
    value: float
    ci_halfwidth: float = 0.0


@dataclass(frozen=True)
class Scenario:
    params: Params
    spec_U: SupportSpec
    spec_V: SupportSpec
    grid: Grid
    horizon: float
    snapshot_times: tuple
    rho: float = 1.0
    alpha: float = 1.0
    measurement: MeasurementConfig = MeasurementConfig()
    c_uv: CuvValue | None = None
    front_numerics: Numerics1D = Numerics1D()
    seed: int = 0
    name: str = ""
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def to_dict(self) -> dict:
        """Normalized form: every default filled in, shapes in canonical serialization."""
        return {
            "name": self.name,
            "params": self.params.to_dict(),
            "U": self.spec_U.to_dict(),
            "V": self.spec_V.to_dict(),
            "rho": self.rho,
            "alpha": self.alpha,
            "grid": {"h": self.grid.h, "half_width": self.grid.half_width},
            "horizon": self.horizon,
            "snapshot_times": list(self.snapshot_times),
            "measurement": vars(self.measurement).copy(),
            "c_uv": None if self.c_uv is None else vars(self.c_uv).copy(),
            "front_speed": {"dx": self.front_numerics.dx, "horizon": self.front_numerics.horizon},
            "seed": self.seed,
        }

    @property
    def hash(self) -> str:
        return scenario_hash(self.to_dict())

    def sim(self) -> SimScenario:
        return SimScenario(self.params, self.grid, self.spec_U, self.spec_V, self.horizon, self.snapshot_times)

    def with_seed(self, seed: int) -> "Scenario":
        from dataclasses import replace

        return replace(self, seed=int(seed))


def scenario_hash(data: dict) -> str:
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canon.encode()).hexdigest()


def required_half_width(params: Params, horizon: float) -> float:
    """Sizing rule: fronts observed up to ``horizon`` stay away from the boundary."""
    return max(params.c_u, params.c_v) * horizon + SIZING_MARGIN


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def add(self, path: str, msg: str) -> None:
        self.errors.append(f"{path}: {msg}")

    def number(self, data: dict, key: str, path: str, default=None, positive=False, nonneg=False):
        val = data.get(key, default)
        if val is None:
            if default is None:
                self.add(f"{path}{key}", "required")
            return default
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            self.add(f"{path}{key}", f"expected a finite number, got {val!r}")
            return default
        if positive and val <= 0:
            self.add(f"{path}{key}", f"must be positive, got {val}")
            return default
        if nonneg and val < 0:
            self.add(f"{path}{key}", f"must be non-negative, got {val}")
            return default
        return float(val)

    def mapping(self, data, path: str) -> dict:
        if data is None:
            return {}
        if not isinstance(data, dict):
            self.add(path, f"expected a mapping, got {type(data).__name__}")
            return {}
        return data


def load_yaml(text: str, origin: str = "<scenario>") -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ScenarioError(f"parse error at {where}: {problem}", origin) from None
    if not isinstance(data, dict):
        raise ScenarioError("top level must be a mapping", origin)
    return data


def parse_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ScenarioError("file not found", str(path))
    return scenario_from_dict(load_yaml(path.read_text(), str(path)), str(path))


def scenario_from_dict(data: dict, origin: str = "<scenario>", check_overlap: bool = True) -> Scenario:
    """Validate every field; all problems are reported together."""
    col = _Collector()
    for key in sorted(set(data) - _TOP_KEYS):
        col.add(key, "unknown field")

    # params
    p = col.mapping(data.get("params"), "params")
    if "params" not in data:
        col.add("params", "required")
    d = col.number(p, "d", "params.", 1.0, positive=True)
    r = col.number(p, "r", "params.", 1.0, positive=True)
    a = col.number(p, "a", "params.", 2.0, nonneg=True)
    b = col.number(p, "b", "params.", 2.0, nonneg=True)
    for k in sorted(set(p) - {"d", "r", "a", "b"}):
        col.add(f"params.{k}", "unknown field")
    for name, val in (("a", a), ("b", b)):
        if val is not None and val <= 1:
            col.add(f"params.{name}", f"(A1) strong competition requires {name} > 1, got {val:g}")
    params = None
    try:
        params = Params(d or 1.0, r or 1.0, a if a is not None else 2.0, b if b is not None else 2.0)
    except ValidationError as exc:
        col.add("params", str(exc))

    # supports
    specs = {}
    for key in ("U", "V"):
        if key not in data:
            col.add(key, "required")
            continue
        try:
            specs[key] = spec_from_dict(data[key], key)
        except ValidationError as exc:
            col.errors.append(str(exc))

    rho = col.number(data, "rho", "", 1.0, positive=True)
    alpha = col.number(data, "alpha", "", 1.0, positive=True)
    horizon = col.number(data, "horizon", "", 40.0, nonneg=True)

    # grid and sizing rule
    g = col.mapping(data.get("grid"), "grid")
    for k in sorted(set(g) - {"h", "half_width"}):
        col.add(f"grid.{k}", "unknown field")
    h = col.number(g, "h", "grid.", 0.25, positive=True)
    grid = None
    if params is not None and horizon is not None and h is not None:
        need = required_half_width(params, horizon)
        hw = col.number(g, "half_width", "grid.", need, positive=True)
        if hw is not None and hw < need - 1e-9:
            col.add("grid.half_width", f"sizing rule needs >= {need:g} (max(c_u, c_v) * horizon + {SIZING_MARGIN:g})")
        elif hw is not None:
            try:
                grid = Grid.centered(hw, h)
            except ValidationError as exc:
                col.add("grid", str(exc))

    # snapshot times
    times: tuple = ()
    st = data.get("snapshot_times")
    if horizon is not None:
        if st is None:
            st = {"every": horizon / 16 if horizon > 0 else 1.0}
        if isinstance(st, dict):
            every = col.number(st, "every", "snapshot_times.", None, positive=True)
            if every is not None:
                n = int(math.floor(horizon / every + 1e-9))
                times = tuple(float(k * every) for k in range(n + 1))
                if times[-1] < horizon - 1e-9:
                    times = times + (horizon,)
        elif isinstance(st, list):
            try:
                times = tuple(float(t) for t in st)
            except (TypeError, ValueError):
                col.add("snapshot_times", "expected a list of numbers")
            if times and any(b_ <= a_ for a_, b_ in zip(times, times[1:])):
                col.add("snapshot_times", "times must be strictly increasing")
            if times and (times[0] < 0 or times[-1] > horizon):
                col.add("snapshot_times", f"times must lie in [0, {horizon:g}]")
        else:
            col.add("snapshot_times", "expected a list or {every: step}")

    # measurement
    m = col.mapping(data.get("measurement"), "measurement")
    for k in sorted(set(m) - {"directions", "level", "window", "tol"}):
        col.add(f"measurement.{k}", "unknown field")
    ndir = m.get("directions", 16)
    if isinstance(ndir, bool) or not isinstance(ndir, int) or ndir < 1:
        col.add("measurement.directions", f"expected a positive integer, got {ndir!r}")
        ndir = 16
    level = col.number(m, "level", "measurement.", 0.5, positive=True)
    if level is not None and level >= 1:
        col.add("measurement.level", "must lie in (0, 1)")
    window = col.number(m, "window", "measurement.", 0.5, positive=True)
    if window is not None and window > 1:
        col.add("measurement.window", "must lie in (0, 1]")
    tol = col.number(m, "tol", "measurement.", 0.1, positive=True)
    meas = MeasurementConfig(ndir, level or 0.5, window or 0.5, tol or 0.1)

    # optional bistable speed
    cuv = None
    raw = data.get("c_uv")
    if isinstance(raw, dict):
        v = col.number(raw, "value", "c_uv.", None)
        ci = col.number(raw, "ci", "c_uv.", 0.0, nonneg=True)
        if v is not None:
            cuv = CuvValue(v, ci or 0.0)
    elif raw is not None:
        v = col.number(data, "c_uv", "", None)
        if v is not None:
            cuv = CuvValue(v)

    fs = col.mapping(data.get("front_speed"), "front_speed")
    for k in sorted(set(fs) - {"dx", "horizon"}):
        col.add(f"front_speed.{k}", "unknown field")
    fdx = col.number(fs, "dx", "front_speed.", 0.25, positive=True)
    fh = col.number(fs, "horizon", "front_speed.", 120.0, positive=True)

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        col.add("seed", f"expected an integer, got {seed!r}")
        seed = 0
    name = data.get("name", "")
    if not isinstance(name, str):
        col.add("name", "expected a string")
        name = ""

    # disjointness on the simulation grid
    if check_overlap and grid is not None and "U" in specs and "V" in specs:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            overlap = rasterize_support(specs["U"], grid) * rasterize_support(specs["V"], grid)
        n = int(overlap.sum())
        if n:
            iy, ix = np.argwhere(overlap)[0]
            col.add("U,V", f"supports must satisfy U∩V=∅; {n} grid cells overlap, e.g. near "
                            f"({grid.xs[ix]:.4g}, {grid.ys[iy]:.4g})")

    if col.errors:
        exc = ScenarioError("invalid scenario: " + "; ".join(col.errors), origin)
        exc.errors = [f"{origin}: {e}" for e in col.errors]
        raise exc
    return Scenario(params, specs["U"], specs["V"], grid, horizon, times, rho, alpha, meas, cuv,
                    Numerics1D(dx=fdx, horizon=fh), seed, name, source=dict(data))
