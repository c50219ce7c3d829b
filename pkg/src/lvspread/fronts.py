"""Scalar front speeds: the two KPP speeds in closed form and the bistable speed by simulation."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._kernels import advance, stable_dt
from .errors import InconclusiveError, PreconditionError, ValidationError
from .geometry.conditions import ConditionReport, Verdict

log = logging.getLogger(__name__)

LEVEL = 0.5


def kpp_speed(d: float, r: float) -> float:
    """Minimal travelling-front speed ``2*sqrt(d*r)`` of ``u_t = d u_xx + r u (1 - u)``."""
    if not (d > 0 and r > 0):
        raise ValidationError(f"d and r must be positive, got d={d}, r={r}")
    return 2.0 * math.sqrt(d * r)


@dataclass(frozen=True)
class Params:
    d: float = 1.0
    r: float = 1.0
    a: float = 2.0
    b: float = 2.0

    def __post_init__(self):
        for name in ("d", "r", "a", "b"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or not math.isfinite(val):
                raise ValidationError(f"{name} must be a finite number", name)
        if self.d <= 0:
            raise ValidationError("must be positive", "d")
        if self.r <= 0:
            raise ValidationError("must be positive", "r")
        if self.a < 0 or self.b < 0:
            raise ValidationError("competition coefficients must be non-negative", "a" if self.a < 0 else "b")

    @property
    def c_u(self) -> float:
        return kpp_speed(self.d, self.r)

    @property
    def c_v(self) -> float:
        return 2.0

    @property
    def strong_competition(self) -> bool:
        return self.a > 1 and self.b > 1

    def swapped(self) -> "Params":
        """Same system with the roles of the coefficients ``a`` and ``b`` exchanged."""
        return Params(self.d, self.r, self.b, self.a)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Numerics1D:
    dx: float = 0.25
    horizon: float = 120.0
    dt: float | None = None  # None: the stable step for each resolution
    length: float | None = None  # half-length; None: sized from the fastest admissible front
    record_every: float = 0.5

    def __post_init__(self):
        if self.dx <= 0 or self.horizon <= 0 or self.record_every <= 0:
            raise ValidationError("dx, horizon and record_every must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValidationError("must be positive", "dt")
        if self.length is not None and self.length <= 0:
            raise ValidationError("must be positive", "length")

    def half_length(self, params: Params) -> float:
        if self.length is not None:
            return self.length
        return max(2.0, params.c_u) * self.horizon + 20.0


@dataclass(frozen=True)
class FrontSpeedEstimate:
    value: float
    ci_halfwidth: float
    dx: float
    dt: float
    length: float
    horizon: float
    level: float = LEVEL
    coarse: float = math.nan
    fine: float = math.nan
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.ci_halfwidth >= 0:
            raise ValueError("ci_halfwidth must be non-negative")

    @property
    def lower(self) -> float:
        return self.value - self.ci_halfwidth

    @property
    def upper(self) -> float:
        return self.value + self.ci_halfwidth

    def csv_row(self, params: Params) -> str:
        return (f"{params.d:.6g},{params.r:.6g},{params.a:.6g},{params.b:.6g},"
                f"{self.value:.8g},{self.ci_halfwidth:.3g},{self.dx:.6g},{self.horizon:.6g}")

    CSV_HEADER = "d,r,a,b,c_uv,ci,dx,horizon"


def _front_position(u_row: np.ndarray, x: np.ndarray, level: float) -> float:
    """Rightmost ``level`` crossing of a profile that is high on the left."""
    above = np.flatnonzero(u_row >= level)
    if above.size == 0:
        return -math.inf
    i = above[-1]
    if i == len(u_row) - 1:
        return math.inf
    u0, u1 = u_row[i], u_row[i + 1]
    return float(x[i] + (u0 - level) / (u0 - u1) * (x[i + 1] - x[i]))


def _track(params: Params, dx: float, dt: float, half: float, horizon: float, record_every: float):
    n = 2 * int(math.ceil(half / dx))
    x = (np.arange(n) - n // 2 + 0.5) * dx
    u = (x < 0).astype(float)[None, :]
    v = (x > 0).astype(float)[None, :]
    chunk = max(1, int(round(record_every / dt)))
    total = int(math.ceil(horizon / dt))
    times, pos = [0.0], [_front_position(u[0], x, LEVEL)]
    done = 0
    while done < total:
        k = min(chunk, total - done)
        u, v = advance(u, v, k, dx, dt, params.d, params.r, params.a, params.b)
        done += k
        if not np.isfinite(u).all() or not np.isfinite(v).all():
            raise InconclusiveError(f"non-finite values at t={done * dt:.4g}; reduce dt")
        p = _front_position(u[0], x, LEVEL)
        if not math.isfinite(p) or abs(p) > half - 10.0:
            raise InconclusiveError(f"front reached the domain boundary at t={done * dt:.4g}; use a longer domain")
        times.append(done * dt)
        pos.append(p)
    return np.asarray(times), np.asarray(pos)


def _fit_speed(times: np.ndarray, pos: np.ndarray, horizon: float) -> float:
    keep = times >= 0.5 * horizon
    slope, _ = np.polyfit(times[keep], pos[keep], 1)
    return float(slope)


def estimate_cuv(params: Params, numerics: Numerics1D = Numerics1D()) -> FrontSpeedEstimate:
    """Speed of the bistable front from a long 1D run at ``dx`` and ``dx/2``.

    ``u = 1`` on ``x < 0`` and ``v = 1`` on ``x > 0``; the ``u = 1/2`` crossing
    is tracked and its slope fitted over the second half of the horizon.  The
    two resolutions are combined by second-order extrapolation and their
    difference is the error bar.
    """
    if not params.strong_competition:
        raise PreconditionError(f"strong competition needs a > 1 and b > 1 (a={params.a}, b={params.b})")
    half = numerics.half_length(params)
    speeds = []
    dts = []
    for dx in (numerics.dx, numerics.dx / 2):
        limit = stable_dt(dx, params.d, params.r, params.a, params.b, dim=1)
        dt = limit if numerics.dt is None else numerics.dt * (dx / numerics.dx) ** 2
        if dt > limit * (1 + 1e-12):
            raise PreconditionError(f"dt={dt:.4g} exceeds the stable step {limit:.4g} at dx={dx:.4g}")
        t, p = _track(params, dx, dt, half, numerics.horizon, numerics.record_every)
        speeds.append(_fit_speed(t, p, numerics.horizon))
        dts.append(dt)
    coarse, fine = speeds
    spread = abs(fine - coarse)
    value = fine + (fine - coarse) / 3.0
    log.debug("c_uv coarse=%.6g fine=%.6g extrapolated=%.6g", coarse, fine, value)
    if spread > 0.05 * abs(value) + 0.01:
        raise InconclusiveError(f"no grid convergence: {coarse:.5g} at dx, {fine:.5g} at dx/2")
    lo, hi = -params.c_v, params.c_u
    if not lo < value < hi:
        raise InconclusiveError(f"estimate {value:.5g} outside the admissible bracket ({lo:.5g}, {hi:.5g})")
    return FrontSpeedEstimate(value, spread, numerics.dx, dts[0], half, numerics.horizon,
                              coarse=coarse, fine=fine)


CI_FLOOR = 0.005


def check_assumptions(params: Params, cuv: FrontSpeedEstimate | None = None, ci_floor: float = CI_FLOOR) -> ConditionReport:
    """Gate on strong competition and a positive bistable speed.

    The error bar is never taken narrower than ``ci_floor``: the two-grid
    spread can vanish by symmetry while the fitted value is still only
    accurate to the fit window.
    """
    if not params.strong_competition:
        bad = [f"a={params.a}"] if params.a <= 1 else []
        bad += [f"b={params.b}"] if params.b <= 1 else []
        return ConditionReport("A1", Verdict.FAILS, tuple(bad), note="need a > 1 and b > 1")
    if cuv is None:
        return ConditionReport("A1", Verdict.HOLDS)
    ci = max(cuv.ci_halfwidth, ci_floor)
    note = f"c_uv={cuv.value:.5g} +/- {ci:.3g}"
    if cuv.value - ci > 0:
        return ConditionReport("A2", Verdict.HOLDS, tolerance=ci, note=note)
    if cuv.value + ci < 0:
        return ConditionReport("A2", Verdict.FAILS, (f"c_uv={cuv.value:.5g}",), tolerance=ci, note=note)
    return ConditionReport("A2", Verdict.UNDECIDABLE, (f"c_uv={cuv.value:.5g}",), tolerance=ci, note=note)


# ---------------------------------------------------------------------------
# local invasion radius


@dataclass(frozen=True)
class Numerics2D:
    h: float = 0.5
    horizon: float = 60.0
    rho_lo: float = 0.25
    rho_hi: float = 16.0
    iterations: int = 8
    safety: float = 1.5


def invasion_trial(params: Params, rho: float, h: float = 0.5, horizon: float = 60.0,
                   half_width: float | None = None) -> tuple[bool, dict]:
    """One run with ``u`` the indicator of ``B_rho`` and ``v`` the indicator of its complement.

    Success: ``u(t, 0) > 0.9`` while ``u`` spreads, meaning the area of
    ``{u > 1/2}`` reaches four times the initial disk, or at the horizon it
    exceeds both the initial disk and its own value at half the horizon.
    Failure: ``sup u < 0.01``, or the horizon ends without either.
    """
    if half_width is None:
        half_width = 2.5 * rho + 10.0
    n = 2 * int(math.ceil(half_width / h)) + 1
    c = (np.arange(n) - n // 2) * h
    xx, yy = np.meshgrid(c, c)
    inside = xx * xx + yy * yy <= rho * rho
    u = inside.astype(float)
    v = 1.0 - u
    mid = n // 2
    area0 = max(int(inside.sum()), 1)
    dt = stable_dt(h, params.d, params.r, params.a, params.b, dim=2)
    chunk = max(1, int(round(1.0 / dt)))
    total = int(math.ceil(horizon / dt))
    done = 0
    area_half = None
    info = {"rho": rho, "outcome": "timeout", "t": horizon}
    while done < total:
        k = min(chunk, total - done)
        u, v = advance(u, v, k, h, dt, params.d, params.r, params.a, params.b)
        done += k
        if u.max() < 0.01:
            info.update(outcome="extinct", t=done * dt)
            return False, info
        area = int((u > 0.5).sum())
        if area_half is None and 2 * done >= total:
            area_half = area
        if u[mid, mid] > 0.9 and area >= 4 * area0:
            info.update(outcome="invaded", t=done * dt)
            return True, info
    info["u_center"] = float(u[mid, mid])
    if u[mid, mid] > 0.9 and area > area0 and area > area_half:
        info["outcome"] = "growing"
        return True, info
    return False, info


def calibrate_rho(params: Params, numerics: Numerics2D = Numerics2D()) -> float:
    """Smallest sampled invading radius (bisection), times a safety factor."""
    if not params.strong_competition:
        raise PreconditionError("calibration needs a > 1 and b > 1")
    lo, hi = numerics.rho_lo, numerics.rho_hi
    ok_hi, _ = invasion_trial(params, hi, numerics.h, numerics.horizon)
    if not ok_hi:
        raise InconclusiveError(f"no invasion even at rho={hi}; widen the bracket or lengthen the horizon")
    ok_lo, _ = invasion_trial(params, lo, numerics.h, numerics.horizon)
    if ok_lo:
        return lo * numerics.safety
    for _ in range(numerics.iterations):
        mid = 0.5 * (lo + hi)
        ok, info = invasion_trial(params, mid, numerics.h, numerics.horizon)
        log.debug("rho=%.4g -> %s", mid, info["outcome"])
        if ok:
            hi = mid
        else:
            lo = mid
    return hi * numerics.safety
