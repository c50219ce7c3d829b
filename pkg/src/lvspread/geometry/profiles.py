"""Directional speed profiles on the circle.

A profile maps a direction (angle) to a speed in ``[base_speed, +inf]``.  The
single-species profiles depend on the direction only through its angular gap
to a closed direction set; the competitive profile ``s_u`` is an outer
supremum over dominance directions of the radial extent of a ball hull.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import PreconditionError
from .directions import TWO_PI, DirectionSet, as_angle, circular_distance, normalize_angle, unit

HALF_PI = 0.5 * math.pi
GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


@dataclass(frozen=True)
class SpeedProfile:
    """Extended-real function on the circle, ``+inf`` exactly on ``infinite_set``.

    Call with a scalar angle (or unit vector) for a float, or with an array of
    angles for an array.
    """

    base_speed: float
    infinite_set: DirectionSet
    evaluator: Callable = field(repr=False, compare=False)
    kind: str = "kpp"
    # angular reference set for kpp profiles (equals infinite_set)
    dirset: DirectionSet | None = field(default=None, repr=False, compare=False)

    def __call__(self, theta):
        if np.ndim(theta) == 0:
            return float(self.evaluator(normalize_angle(float(theta))))
        thetas = np.asarray(theta, dtype=float)
        return np.array([self.evaluator(normalize_angle(t)) for t in thetas.ravel()]).reshape(thetas.shape)

    def at(self, e) -> float:
        """Value at a unit vector."""
        return float(self.evaluator(as_angle(e)))

    def values(self, thetas) -> np.ndarray:
        """Vectorized evaluation over an array of angles."""
        vec = getattr(self.evaluator, "vectorized", None)
        thetas = np.asarray(thetas, dtype=float)
        if vec is not None:
            return vec(thetas)
        return self(thetas)

    def to_csv(self, n: int = 360) -> str:
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return profiles_to_csv(thetas, {"value": self.values(thetas)})


def format_value(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return repr(float(x))


def profiles_to_csv(thetas, columns: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["angle", *columns])
    cols = [np.asarray(c, dtype=float) for c in columns.values()]
    for i, t in enumerate(thetas):
        w.writerow([repr(float(t)), *(format_value(c[i]) for c in cols)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# single-species profiles


class _KPPSpeed:
    def __init__(self, dirset: DirectionSet, base: float):
        self.dirset = dirset
        self.base = base

    def __call__(self, theta: float) -> float:
        g = self.dirset.gap(theta)
        if g == 0.0:
            return math.inf
        if g >= HALF_PI:
            return self.base
        return self.base / math.sin(g)

    def vectorized(self, thetas: np.ndarray) -> np.ndarray:
        g = self.dirset.gaps(thetas)
        with np.errstate(divide="ignore"):
            out = np.where(g >= HALF_PI, self.base, self.base / np.sin(np.minimum(g, HALF_PI)))
        return np.where(g == 0.0, np.inf, out)

    def sine_deficit(self, theta: float) -> float:
        """``1 - base/value`` computed without cancellation."""
        g = self.dirset.gap(theta)
        if g >= HALF_PI:
            return 0.0
        return 2.0 * math.sin(0.5 * (HALF_PI - g)) ** 2


def speed_profile(dirset: DirectionSet, base_speed: float) -> SpeedProfile:
    """Profile ``e -> base / dist(e, R+ dirset)`` with the usual conventions."""
    if not base_speed > 0:
        raise PreconditionError(f"base speed must be > 0, got {base_speed}")
    dirset = dirset.closure()
    return SpeedProfile(float(base_speed), dirset, _KPPSpeed(dirset, float(base_speed)), "kpp", dirset)


def speed_by_sup(dirset: DirectionSet, base_speed: float, e) -> float:
    """Supremum form over the nearest admissible arc points (reference for the gap form)."""
    t = as_angle(e)
    if dirset.closure().contains(t):
        return math.inf
    best = base_speed
    for xi in dirset.endpoints() or [a.start for a in dirset.arcs]:
        dot = math.cos(xi - t)
        if dot >= 0.0:
            best = max(best, base_speed / math.sqrt(max(1.0 - dot * dot, 0.0)))
    return best


def project_onto_cone(e, dirset: DirectionSet) -> np.ndarray:
    """Nearest point of ``R+ dirset U {0}`` to the unit vector ``e``.

    Ties between two arc points resolve to the smaller normalized angle.
    """
    t = as_angle(e)
    near = dirset.closure().nearest(t)
    if not near:
        return np.zeros(2)
    xi = near[0]
    dot = math.cos(xi - t)
    if dot <= 0.0:
        return np.zeros(2)
    return dot * unit(xi)


def projection_candidates(e, dirset: DirectionSet) -> list[np.ndarray]:
    """All projections of ``e`` (at most two in the plane), tie-break order."""
    t = as_angle(e)
    near = dirset.closure().nearest(t)
    out = []
    for xi in near:
        dot = math.cos(xi - t)
        out.append(dot * unit(xi) if dot > 0.0 else np.zeros(2))
    return out or [np.zeros(2)]


# ---------------------------------------------------------------------------
# dominance set {w_u >= w_v}


def _ge_margin(prof_u: SpeedProfile, prof_v: SpeedProfile, theta: float) -> float:
    """Sign-exact margin, >= 0 iff ``prof_u(theta) >= prof_v(theta)``."""
    wu, wv = prof_u.evaluator(theta), prof_v.evaluator(theta)
    if math.isinf(wu):
        return 1.0
    if math.isinf(wv):
        return -1.0
    eu, ev = prof_u.evaluator, prof_v.evaluator
    if isinstance(eu, _KPPSpeed) and isinstance(ev, _KPPSpeed):
        # w = base / (1 - deficit); compare base_u (1 - def_v) >= base_v (1 - def_u)
        du, dv = eu.sine_deficit(theta), ev.sine_deficit(theta)
        return (eu.base - ev.base) + ev.base * du - eu.base * dv
    return wu - wv


def dominance_set(prof_u: SpeedProfile, prof_v: SpeedProfile, n: int = 4096) -> DirectionSet:
    """Closed set of directions where ``prof_u >= prof_v``.

    Sampled on ``n`` angles plus every structural angle of the two profiles,
    then every sign change is bisected to machine resolution.
    """
    special = []
    for p in (prof_u, prof_v):
        if p.dirset is not None:
            for x in p.dirset.endpoints():
                special += [x, x + HALF_PI, x - HALF_PI]
    grid = np.unique(np.mod(np.concatenate([np.linspace(0.0, TWO_PI, n, endpoint=False), special]), TWO_PI))
    flags = [_ge_margin(prof_u, prof_v, t) >= 0.0 for t in grid]
    if all(flags):
        return DirectionSet.full()
    if not any(flags):
        return DirectionSet.empty()

    def boundary(t_in: float, t_out: float) -> float:
        # bisect on the shorter arc between a True and a False sample
        lo, hi = t_in, t_out
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if _ge_margin(prof_u, prof_v, normalize_angle(mid)) >= 0.0:
                lo = mid
            else:
                hi = mid
        return lo

    m = len(grid)
    k0 = flags.index(False)
    # unwrap so the scan starts and ends on the same False sample
    idx = [(k0 + j) % m for j in range(m + 1)]
    ang = [grid[i] + TWO_PI * ((k0 + j) // m) for j, i in enumerate(idx)]
    arcs = []
    start = None
    for j in range(1, m + 1):
        now, before = flags[idx[j]], flags[idx[j - 1]]
        if now and not before:
            start = boundary(ang[j], ang[j - 1])
        elif before and not now:
            arcs.append((start, boundary(ang[j - 1], ang[j])))
    return DirectionSet.from_arcs(arcs)


# ---------------------------------------------------------------------------
# competitive profile


def hull_extent(w: float, cos_t: float, sin_t: float, c_uv: float) -> float:
    """Radial extent along ``e`` of the ball hull with apex ``w*xi`` and base ``B_{c_uv}``.

    ``cos_t = xi.e``, ``sin_t = |sin(angle(xi, e))|``.  Only meaningful when
    ``cos_t > c_uv / w``; ``w = inf`` gives the half-cylinder limit.
    """
    if math.isinf(w):
        return c_uv / sin_t if sin_t > 0.0 else math.inf
    return w * c_uv / (sin_t * math.sqrt(w * w - c_uv * c_uv) + c_uv * cos_t)


def inner_objective(c, cos_t, sin_t, c_uv):
    """Radial extent of the ball hull with apex speed ``c``; vectorized in ``c``."""
    c = np.asarray(c, dtype=float)
    return c * c_uv / (sin_t * np.sqrt(c * c - c_uv * c_uv) + c_uv * cos_t)


class _RefinedSpeed:
    def __init__(self, prof_u, prof_v, c_uv, dom, scan=512, xtol=1e-10):
        self.prof_u, self.prof_v, self.c_uv = prof_u, prof_v, c_uv
        self.dom = dom
        self.scan = scan
        self.xtol = xtol
        self.arcs = [a for a in dom.arcs]
        self.unbounded = prof_u.infinite_set

    def _g(self, xi: float, t: float) -> float:
        w = self.prof_u.evaluator(normalize_angle(xi))
        d = xi - t
        cos_t = math.cos(d)
        if w * cos_t <= self.c_uv:
            return -math.inf
        return hull_extent(w, cos_t, abs(math.sin(d)), self.c_uv)

    def _g_many(self, xis: np.ndarray, t: float) -> np.ndarray:
        w = self.prof_u.values(np.mod(xis, TWO_PI))
        d = xis - t
        cos_t, sin_t = np.cos(d), np.abs(np.sin(d))
        c = self.c_uv
        with np.errstate(divide="ignore", invalid="ignore"):
            finite = w * c / (sin_t * np.sqrt(np.maximum(w * w - c * c, 0.0)) + c * cos_t)
            cyl = np.where(sin_t > 0.0, c / sin_t, np.inf)
        out = np.where(np.isinf(w), cyl, finite)
        return np.where(w * cos_t > c, out, -np.inf)

    def _golden(self, a: float, b: float, t: float) -> tuple[float, float]:
        f = lambda x: self._g(x, t)
        x1 = b - GOLDEN * (b - a)
        x2 = a + GOLDEN * (b - a)
        f1, f2 = f(x1), f(x2)
        while b - a > self.xtol:
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + GOLDEN * (b - a)
                f2 = f(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - GOLDEN * (b - a)
                f1 = f(x1)
        x = 0.5 * (a + b)
        return x, f(x)

    def __call__(self, t: float) -> float:
        if self.unbounded.contains(t):
            return math.inf
        best = self.c_uv
        for arc in self.arcs:
            lo, hi = arc.start, arc.start + arc.width
            # place the arc on the branch nearest to t
            shift = TWO_PI * round((0.5 * (lo + hi) - t) / TWO_PI)
            lo, hi = lo - shift, hi - shift
            cands = [lo, hi]
            if lo <= t <= hi:
                cands.append(t)
            else:
                for tt in (t - TWO_PI, t + TWO_PI):
                    if lo <= tt <= hi:
                        cands.append(tt)
            for x in cands:
                best = max(best, self._g(x, t))
            if arc.width <= 0.0:
                continue
            k = max(16, int(self.scan * arc.width / TWO_PI))
            xs = np.linspace(lo, hi, k + 1)
            gs = self._g_many(xs, t)
            i = int(np.argmax(gs))
            if not np.isfinite(gs[i]) and gs[i] < 0:
                continue
            best = max(best, float(gs[i]))
            a, b = xs[max(i - 1, 0)], xs[min(i + 1, k)]
            if b > a:
                _, fx = self._golden(a, b, t)
                best = max(best, fx)
        return best

    def vectorized(self, thetas: np.ndarray) -> np.ndarray:
        flat = np.ravel(thetas)
        return np.array([self(normalize_angle(t)) for t in flat]).reshape(np.shape(thetas))


def s_u_profile(prof_u: SpeedProfile, prof_v: SpeedProfile, c_uv: float, dom: DirectionSet | None = None) -> SpeedProfile:
    """Refined spreading speed of ``u`` under competition.

    For each dominance direction ``xi`` (``w_u(xi) >= w_v(xi)``) the inner
    supremum over apex speeds is its limit at ``w_u(xi)`` (the extent is
    increasing in the apex speed); the outer supremum uses a dense scan per
    dominance arc refined by golden-section search, plus arc endpoints and
    ``e`` itself.
    """
    if not (0.0 < c_uv < prof_u.base_speed):
        raise PreconditionError(
            f"c_uv must satisfy 0 < c_uv < c_u (assumption A2 and c_uv < c_u); got c_uv={c_uv}, c_u={prof_u.base_speed}"
        )
    if dom is None:
        dom = dominance_set(prof_u, prof_v)
    fn = _RefinedSpeed(prof_u, prof_v, float(c_uv), dom)
    return SpeedProfile(float(c_uv), prof_u.infinite_set, fn, "refined", None)


def crossing_angles(dom: DirectionSet) -> list[float]:
    """Boundary directions of a dominance set (where the two speeds meet)."""
    return dom.endpoints()


__all__ = [
    "SpeedProfile", "speed_profile", "speed_by_sup", "project_onto_cone", "projection_candidates",
    "dominance_set", "hull_extent", "inner_objective", "s_u_profile", "crossing_angles",
    "profiles_to_csv", "format_value", "circular_distance",
]
