"""Front tracking along rays and prediction-versus-simulation reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import InsufficientDataError, ValidationError
from .geometry.directions import TWO_PI, as_angle, circular_distance
from .geometry.profiles import crossing_angles
from .geometry.sets import SpreadingSets
from .simulator import Grid, SnapshotSeries

DEFAULT_LEVEL = 0.5
DEFAULT_WINDOW = 0.5
DEFAULT_TOL = 0.10
CRITICAL_DEG = 2.0
EXTINCT_LEVEL = 0.05


def sample_field(arr: np.ndarray, grid: Grid, points) -> np.ndarray:
    """Bilinear interpolation at physical points; ``nan`` outside the cell-centre hull."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    ix = (p[:, 0] - grid.origin[0]) / grid.h
    iy = (p[:, 1] - grid.origin[1]) / grid.h
    vals = map_coordinates(arr, [iy, ix], order=1, mode="nearest")
    outside = (ix < 0) | (ix > grid.nx - 1) | (iy < 0) | (iy > grid.ny - 1)
    return np.where(outside, np.nan, vals)


def _ray_reach(grid: Grid, theta: float) -> float:
    """Distance from the origin to the last cell centre along the ray."""
    x0, x1, y0, y1 = grid.extent
    c, s = math.cos(theta), math.sin(theta)
    reach = math.inf
    if c > 1e-15:
        reach = min(reach, x1 / c)
    elif c < -1e-15:
        reach = min(reach, x0 / c)
    if s > 1e-15:
        reach = min(reach, y1 / s)
    elif s < -1e-15:
        reach = min(reach, y0 / s)
    return max(reach, 0.0)


def level_radius(arr: np.ndarray, grid: Grid, e, level: float = DEFAULT_LEVEL, step: float | None = None) -> float | None:
    """Outermost radius along the ray from the origin where the field drops below ``level``.

    ``None`` when the field never reaches ``level`` on the ray, or when it is
    still above ``level`` where the ray leaves the grid.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must lie in (0, 1), got {level}")
    theta = as_angle(e)
    step = grid.h / 4 if step is None else step
    reach = _ray_reach(grid, theta)
    rs = np.arange(0.0, reach + 1e-12, step)
    pts = np.stack([rs * math.cos(theta), rs * math.sin(theta)], axis=1)
    f = sample_field(arr, grid, pts)
    above = np.flatnonzero(f >= level)
    if above.size == 0:
        return None
    i = above[-1]
    if i == len(f) - 1:
        return None
    f0, f1 = f[i], f[i + 1]
    return float(rs[i] + (f0 - level) / (f0 - f1) * (rs[i + 1] - rs[i]))


@dataclass(frozen=True)
class SpeedEstimate:
    direction: float
    value: float
    r2: float
    samples: int

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("speed must be finite")
        if not 0.0 <= self.r2 <= 1.0:
            raise ValueError(f"r2 out of range: {self.r2}")


def fit_speed(times: Sequence[float], radii: Sequence[float], direction: float = 0.0) -> SpeedEstimate:
    """Least-squares slope of radius against time."""
    t = np.asarray(times, dtype=float)
    r = np.asarray(radii, dtype=float)
    if t.size < 4:
        raise InsufficientDataError(f"need at least 4 valid radii, got {t.size}")
    tm, rm = t.mean(), r.mean()
    stt = np.sum((t - tm) ** 2)
    slope = float(np.sum((t - tm) * (r - rm)) / stt)
    resid = r - (rm + slope * (t - tm))
    srr = float(np.sum((r - rm) ** 2))
    sse = float(np.sum(resid ** 2))
    r2 = 1.0 if srr <= 1e-24 * max(1.0, rm * rm) else min(max(1.0 - sse / srr, 0.0), 1.0)
    return SpeedEstimate(direction, slope, r2, int(t.size))


def _window_indices(series: SnapshotSeries, window: float) -> list[int]:
    if not 0.0 < window <= 1.0:
        raise ValidationError(f"window must lie in (0, 1], got {window}")
    t_end = series.times[-1]
    start = t_end * (1.0 - window)
    return [i for i, t in enumerate(series.times) if t >= start - 1e-12]


def radii_table(series: SnapshotSeries, thetas: Iterable[float], which: str = "u",
                level: float = DEFAULT_LEVEL, indices: Sequence[int] | None = None):
    """Level radii for each (snapshot, direction); each snapshot is read once."""
    thetas = list(thetas)
    idx = list(range(len(series))) if indices is None else list(indices)
    times = [series.times[i] for i in idx]
    table = []
    for i in idx:
        f = series.load(i)
        arr = f.u if which == "u" else f.v
        table.append([level_radius(arr, series.grid, th, level) for th in thetas])
    return times, table


def _speed_from_column(times, column, theta) -> SpeedEstimate:
    pairs = [(t, r) for t, r in zip(times, column) if r is not None]
    if len(pairs) < 4:
        raise InsufficientDataError(f"only {len(pairs)} valid radii in the fit window at {theta:.4g} rad")
    ts, rs = zip(*pairs)
    return fit_speed(ts, rs, theta)


def directional_speed(series: SnapshotSeries, e, level: float = DEFAULT_LEVEL, window: float = DEFAULT_WINDOW,
                      which: str = "u") -> SpeedEstimate:
    """Slope of the level radius over the final ``window`` fraction of the run."""
    theta = as_angle(e)
    idx = _window_indices(series, window)
    times, table = radii_table(series, [theta], which, level, idx)
    return _speed_from_column(times, [row[0] for row in table], theta)


@dataclass
class SpreadingCheck:
    which: str
    target: float
    tol: float
    final_time: float
    max_deviation: float
    trend: list
    unobservable: list = field(default_factory=list)

    @property
    def observable(self) -> bool:
        return math.isfinite(self.max_deviation)

    @property
    def passed(self) -> bool:
        return self.observable and self.max_deviation < self.tol

    def summary(self) -> str:
        status = "pass" if self.passed else ("unobservable" if not self.observable else "fail")
        trend = ", ".join(f"{x:.3g}" for x in self.trend)
        return (f"{self.which}->{self.target:g} at t={self.final_time:.4g}: max deviation "
                f"{self.max_deviation:.3g} (tol {self.tol:g}), last deviations [{trend}], "
                f"{len(self.unobservable)} unobservable points: {status}")


def empirical_spreading_check(series: SnapshotSeries, points, which: str = "u", target: float = 1.0,
                              tol: float = 0.1) -> SpreadingCheck:
    """Deviation of the field at ``t*x`` from ``target`` for each test point ``x``."""
    if which not in ("u", "v"):
        raise ValidationError(f"which must be 'u' or 'v', got {which!r}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    devs = []
    unobservable: set[int] = set()
    for i in range(len(series)):
        f = series.load(i)
        t = series.times[i]
        vals = sample_field(f.u if which == "u" else f.v, series.grid, t * pts)
        bad = np.isnan(vals)
        if i == len(series) - 1:
            unobservable = set(np.flatnonzero(bad).tolist())
        dev = np.abs(vals[~bad] - target)
        devs.append(float(dev.max()) if dev.size else math.nan)
    final = devs[-1] if devs and not math.isnan(devs[-1]) else math.inf
    return SpreadingCheck(which, target, tol, series.times[-1], final, devs[-3:],
                          [tuple(pts[k]) for k in sorted(unobservable)])


# ---------------------------------------------------------------------------
# reports


@dataclass
class ReportRow:
    species: str
    angle: float
    predicted: float | str
    measured: float | str
    rel_error: float
    verdict: str
    flag: str = ""
    r2: float = math.nan
    note: str = ""

    def cells(self) -> list[str]:
        def num(x):
            if isinstance(x, str):
                return x
            return "inf" if math.isinf(x) else ("nan" if math.isnan(x) else f"{x:.6g}")

        return [self.species, f"{self.angle:.6f}", num(self.predicted), num(self.measured),
                num(self.rel_error), self.verdict, self.flag, num(self.r2), self.note]


CSV_COLUMNS = ["species", "angle", "predicted", "measured", "rel_error", "verdict", "flag", "r2", "note"]


@dataclass
class VerificationReport:
    rows: list
    audits: list
    tol: float
    provenance: dict = field(default_factory=dict)
    hypotheses: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if r.verdict == "fail" and r.flag != "critical"]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def triples(self, species: str = "u") -> list[tuple]:
        """Plot-ready ``(angle, predicted, measured)`` for numeric rows."""
        return [(r.angle, r.predicted, r.measured) for r in self.rows
                if r.species == species and not isinstance(r.predicted, str) and not isinstance(r.measured, str)]

    def summary(self) -> str:
        lines = ["# verification summary"]
        for k, v in self.provenance.items():
            lines.append(f"{k}: {v}")
        for h in self.hypotheses:
            lines.append(f"hypothesis {h}")
        n_crit = sum(r.flag == "critical" for r in self.rows)
        lines.append(f"rows: {len(self.rows)}, failures: {len(self.failures)}, critical: {n_crit}, tolerance: {self.tol:g}")
        for a in self.audits:
            lines.append(f"audit {a}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _ray_points(grid: Grid, theta: float, horizon: float, n: int = 24) -> np.ndarray:
    """A compact segment of the ray that stays observable up to ``horizon``."""
    top = 0.9 * _ray_reach(grid, theta) / horizon
    lam = np.linspace(0.1 * top, top, n)
    return np.stack([lam * math.cos(theta), lam * math.sin(theta)], axis=1)


def compare_report(predicted: SpreadingSets, series: SnapshotSeries, directions: int = 16, tol: float = DEFAULT_TOL,
                   level: float = DEFAULT_LEVEL, window: float = DEFAULT_WINDOW, hypotheses: Sequence = (),
                   provenance: dict | None = None) -> VerificationReport:
    """Measured directional speeds against the predicted profiles.

    u rows compare against ``s_u`` (equal to ``w_u`` on dominance arcs).  v
    rows compare against ``w_v`` where ``v`` is predicted to persist and check
    extinction elsewhere.  Infinite predictions are audited by an empirical
    check on a compact piece of the ray instead of a slope.
    """
    if directions < 1:
        raise ValidationError("need at least one direction")
    thetas = [TWO_PI * k / directions for k in range(directions)]
    crossings = crossing_angles(predicted.dominance)
    crit = math.radians(CRITICAL_DEG)
    idx = _window_indices(series, window)
    t_u, tab_u = radii_table(series, thetas, "u", level, idx)
    t_v, tab_v = radii_table(series, thetas, "v", level, idx)
    final = series.final()
    horizon = series.times[-1]
    rows, audits = [], []
    for k, th in enumerate(thetas):
        flag = "critical" if any(circular_distance(th, c) < crit for c in crossings) else ""
        # u
        pred = float(predicted.s_u(th))
        if math.isinf(pred):
            chk = empirical_spreading_check(series, _ray_points(series.grid, th, horizon), "u", 1.0, tol)
            audits.append(f"u at {th:.4f} rad (prediction infinite): {chk.summary()}")
            rows.append(ReportRow("u", th, pred, "n/a", math.nan, "pass" if chk.passed else "fail", flag,
                                  note="prediction infinite; empirical check"))
        else:
            rows.append(_speed_row("u", th, pred, t_u, [r[k] for r in tab_u], tol, flag))
        # v
        if predicted.v_survives(th):
            pv = float(predicted.w_v(th))
            if math.isinf(pv):
                chk = empirical_spreading_check(series, _ray_points(series.grid, th, horizon), "v", 1.0, tol)
                audits.append(f"v at {th:.4f} rad (prediction infinite): {chk.summary()}")
                rows.append(ReportRow("v", th, pv, "n/a", math.nan, "pass" if chk.passed else "fail", flag,
                                      note="prediction infinite; empirical check"))
            else:
                rows.append(_speed_row("v", th, pv, t_v, [r[k] for r in tab_v], tol, flag))
        else:
            reach = _ray_reach(series.grid, th)
            rs = np.arange(0.0, reach, series.grid.h / 2)
            vals = sample_field(final.v, series.grid, np.stack([rs * math.cos(th), rs * math.sin(th)], axis=1))
            sup_v = float(np.nanmax(vals))
            rows.append(ReportRow("v", th, "extinct", sup_v, math.nan,
                                  "pass" if sup_v < EXTINCT_LEVEL else "fail", flag,
                                  note=f"sup v on ray at t={horizon:.4g}"))
    return VerificationReport(rows, audits, tol, dict(provenance or {}), [str(h) for h in hypotheses])


def _speed_row(species, th, pred, times, column, tol, flag) -> ReportRow:
    try:
        est = _speed_from_column(times, column, th)
    except InsufficientDataError as exc:
        return ReportRow(species, th, pred, "insufficient", math.nan, "fail", flag, note=str(exc))
    rel = abs(est.value - pred) / abs(pred) if pred != 0 else abs(est.value)
    return ReportRow(species, th, pred, est.value, rel, "pass" if rel <= tol else "fail", flag, est.r2)
