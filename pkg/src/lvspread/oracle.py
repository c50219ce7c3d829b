"""Brute-force references for the closed-form geometry.

Everything here is deliberately naive: dense uniform sampling, no use of the
closed forms in :mod:`lvspread.geometry.profiles`.  These functions are meant
for the test suite, not the user path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry.directions import TWO_PI, DirectionSet, as_angle
from .geometry.profiles import SpeedProfile
from .geometry.shapes import (
    Ball,
    BallChain,
    Complement,
    Cone,
    HalfPlane,
    Strip,
    SupportSpec,
    Translate,
    Union,
)

SENTINEL = 1e12


@dataclass(frozen=True)
class OracleConfig:
    n_dirs: int = 100_000
    n_c: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.n_dirs < 100 or self.n_c < 100:
            raise ValueError("oracle sample counts must be >= 100")


def brute_force_speed(dirset: DirectionSet, base: float, e, cfg: OracleConfig = OracleConfig()) -> float:
    t = as_angle(e)
    if dirset.closure().contains(t):
        return SENTINEL
    xi = nested_sample(dirset, cfg.n_dirs)
    if xi.size == 0:
        return base
    dots = np.cos(xi - t)
    ok = dots >= 0.0
    if not ok.any():
        return base
    with np.errstate(divide="ignore"):
        vals = base / np.sqrt(1.0 - dots[ok] ** 2)
    return float(max(base, vals.max()))


def nested_sample(dirset: DirectionSet, n: int) -> np.ndarray:
    """About ``n`` equally spaced angles inside the arcs, plus every endpoint.

    The lattice is anchored at 0 with spacing ``measure / n``, so the sample
    for ``2n`` contains the sample for ``n``.
    """
    ends = np.asarray(dirset.endpoints(), dtype=float)
    total = dirset.measure
    if total <= 0.0:
        return ends
    step = total / n
    parts = [ends]
    for lo, hi, _, _ in dirset.pieces:
        k = np.arange(math.ceil(lo / step), math.floor(hi / step) + 1)
        parts.append(k * step)
    return np.mod(np.concatenate(parts), TWO_PI)


def _c_grid(lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    """Rows of points in ``(lo, hi)``: half uniform, half accumulating geometrically at ``hi``."""
    k = n // 2
    lin = np.linspace(0.0, 1.0, k + 1)[1:-1]
    gap = np.geomspace(0.5, 1e-9, n - k)
    fr = np.concatenate([lin, 1.0 - gap])
    return lo[:, None] + fr[None, :] * (hi - lo)[:, None]


def _anchored_grid(t: float, n: int, *dirsets: DirectionSet) -> np.ndarray:
    """Uniform grid containing ``t``, plus every arc endpoint of ``dirsets``."""
    grid = np.mod(t + np.arange(n) * (TWO_PI / n), TWO_PI)
    extra = [d.endpoints() for d in dirsets]
    return np.concatenate([grid, *[np.asarray(x, dtype=float) for x in extra]])


def brute_force_su(prof_u: SpeedProfile, prof_v: SpeedProfile, c_uv: float, e,
                   cfg: OracleConfig = OracleConfig(), chunk: int = 4096) -> float:
    """Double supremum over a direction grid and an apex-speed grid.

    For a direction ``xi`` and apex speed ``c`` the objective is the distance
    along ``e`` at which the ray leaves the convex hull of ``B(c_uv)`` and the
    point ``c xi``.
    """
    if c_uv <= 0:
        raise ValueError("c_uv must be positive")
    t = as_angle(e)
    if prof_u.infinite_set.contains(t):
        return SENTINEL
    xis = _anchored_grid(t, cfg.n_dirs, prof_u.infinite_set, prof_v.infinite_set)
    wu, wv = prof_u.values(xis), prof_v.values(xis)
    b = np.cos(xis - t)
    with np.errstate(divide="ignore", invalid="ignore"):
        admissible = (wu >= wv) & (b > c_uv / wu)
    if not admissible.any():
        return c_uv
    w, b = wu[admissible], b[admissible]
    a = np.abs(np.sin(xis[admissible] - t))
    top = np.where(np.isfinite(w), w, 1e9 * c_uv)
    best = -math.inf
    for lo in range(0, len(w), chunk):
        sl = slice(lo, lo + chunk)
        cs = _c_grid(c_uv / b[sl], top[sl], cfg.n_c)
        vals = cs * c_uv / (a[sl, None] * np.sqrt(cs * cs - c_uv * c_uv) + c_uv * b[sl, None])
        best = max(best, float(vals.max()))
    return best


def brute_force_su_balls(prof_u: SpeedProfile, prof_v: SpeedProfile, c_uv: float, e,
                         cfg: OracleConfig = OracleConfig()) -> float:
    """Radial extent along ``e`` of the union of shrinking balls defining ``S_u``.

    Uses only the set-level description: balls ``B(tau*c_uv)`` centred at
    ``(1-tau)*w_u(xi)*xi`` for dominance directions ``xi``, half-cylinders
    ``R+ xi + B(c_uv)`` where ``w_u(xi)`` is infinite, and ``B(c_uv)`` itself.
    """
    t = as_angle(e)
    if prof_u.infinite_set.contains(t):
        return SENTINEL
    ev = np.array([math.cos(t), math.sin(t)])
    xis = _anchored_grid(t, cfg.n_dirs, prof_u.infinite_set, prof_v.infinite_set)
    wu, wv = prof_u.values(xis), prof_v.values(xis)
    keep = wu >= wv
    xis, wu = xis[keep], wu[keep]
    best = c_uv
    if xis.size == 0:
        return best
    dirs = np.stack([np.cos(xis), np.sin(xis)], axis=1)
    inf = np.isinf(wu)
    # half-cylinders
    if inf.any():
        b = dirs[inf] @ ev
        a = np.abs(dirs[inf, 0] * ev[1] - dirs[inf, 1] * ev[0])
        with np.errstate(divide="ignore"):
            ext = np.where(b > 0.0, np.where(a > 0, c_uv / a, np.inf), c_uv)
        best = max(best, float(ext.max()))
    fin = ~inf
    if fin.any():
        k = cfg.n_c // 2
        taus = np.concatenate([np.geomspace(1e-9, 1e-2, cfg.n_c - k), np.linspace(1e-2, 1.0, k)])
        d, w = dirs[fin], wu[fin]
        for lo in range(0, len(w), 512):
            centers = ((1.0 - taus)[None, :, None] * w[lo:lo + 512, None, None]) * d[lo:lo + 512, None, :]
            radii = taus[None, :] * c_uv
            along = centers @ ev
            perp2 = np.einsum("ijk,ijk->ij", centers, centers) - along ** 2
            reach2 = radii ** 2 - perp2
            ext = np.where(reach2 > 0.0, along + np.sqrt(np.maximum(reach2, 0.0)), -np.inf)
            best = max(best, float(ext.max()))
    return best


# ---------------------------------------------------------------------------
# exact membership and distances


def brute_force_membership(spec: SupportSpec, points) -> np.ndarray:
    """Exact membership of each point (shape ``(..., 2)``) in the support."""
    p = np.asarray(points, dtype=float)
    x, y = p[..., 0], p[..., 1]
    if isinstance(spec, Ball):
        cx, cy = spec.center
        return (x - cx) ** 2 + (y - cy) ** 2 <= spec.radius ** 2
    if isinstance(spec, HalfPlane):
        return x * spec.normal[0] + y * spec.normal[1] <= spec.offset
    if isinstance(spec, Cone):
        dx, dy = x - spec.vertex[0], y - spec.vertex[1]
        rel = np.mod(np.arctan2(dy, dx) - spec.angle_lo, TWO_PI)
        return (rel > 0.0) & (rel < spec.width) & ((dx != 0.0) | (dy != 0.0))
    if isinstance(spec, Strip):
        return np.abs(x * spec.normal[0] + y * spec.normal[1]) <= spec.half_width
    if isinstance(spec, BallChain):
        out = np.zeros(x.shape, dtype=bool)
        for cx, cy in spec.centers():
            out |= (x - cx) ** 2 + (y - cy) ** 2 <= spec.radius ** 2
        return out
    if isinstance(spec, Union):
        out = np.zeros(x.shape, dtype=bool)
        for m in spec.members:
            out |= brute_force_membership(m, p)
        return out
    if isinstance(spec, Translate):
        return brute_force_membership(spec.inner, p - np.asarray(spec.shift))
    if isinstance(spec, Complement):
        return ~brute_force_membership(spec.inner, p)
    raise TypeError(f"not a shape: {spec!r}")


def _ray_dist(p, origin, direction):
    rel = p - origin
    s = np.maximum(rel @ direction, 0.0)
    foot = origin + s[..., None] * direction
    return np.linalg.norm(p - foot, axis=-1)


def brute_force_dist(spec: SupportSpec, points, ray_budget: int = 720) -> np.ndarray:
    """Distance from each point to the closure of the support.

    Analytic per shape with union-min; complements fall back to ray marching
    with ``ray_budget`` rays.
    """
    p = np.asarray(points, dtype=float)
    if isinstance(spec, Ball):
        return np.maximum(np.linalg.norm(p - np.asarray(spec.center), axis=-1) - spec.radius, 0.0)
    if isinstance(spec, HalfPlane):
        return np.maximum(p @ np.asarray(spec.normal) - spec.offset, 0.0)
    if isinstance(spec, Strip):
        return np.maximum(np.abs(p @ np.asarray(spec.normal)) - spec.half_width, 0.0)
    if isinstance(spec, Cone):
        v = np.asarray(spec.vertex)
        d1 = np.array([math.cos(spec.angle_lo), math.sin(spec.angle_lo)])
        d2 = np.array([math.cos(spec.angle_hi), math.sin(spec.angle_hi)])
        dist = np.minimum(_ray_dist(p, v, d1), _ray_dist(p, v, d2))
        return np.where(brute_force_membership(spec, p), 0.0, dist)
    if isinstance(spec, BallChain):
        return np.min([brute_force_dist(Ball(tuple(c), spec.radius), p) for c in spec.centers()], axis=0)
    if isinstance(spec, Union):
        if not spec.members:
            return np.full(p.shape[:-1], np.inf)
        return np.min([brute_force_dist(m, p) for m in spec.members], axis=0)
    if isinstance(spec, Translate):
        return brute_force_dist(spec.inner, p - np.asarray(spec.shift))
    if isinstance(spec, Complement):
        flat = p.reshape(-1, 2)
        inside_inner = brute_force_membership(spec.inner, flat)
        out = np.zeros(len(flat))
        for i in np.flatnonzero(inside_inner):
            out[i] = ray_march_exit(spec.inner, flat[i], ray_budget)
        return out.reshape(p.shape[:-1])
    raise TypeError(f"not a shape: {spec!r}")


def ray_march_exit(spec: SupportSpec, point, ray_budget: int = 720, r_max: float = 1e3, tol: float = 1e-9) -> float:
    """Smallest distance along ``ray_budget`` rays at which membership is lost."""
    point = np.asarray(point, dtype=float)
    th = np.linspace(0.0, TWO_PI, ray_budget, endpoint=False)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    radii = np.concatenate([[0.0], np.geomspace(1e-6, r_max, 120)])
    pts = point[None, None, :] + radii[None, :, None] * dirs[:, None, :]
    inside = brute_force_membership(spec, pts)
    if not inside[0, 0]:
        return 0.0
    exits = ~inside
    hit = exits.any(axis=1)
    if not hit.any():
        return math.inf
    k = np.flatnonzero(hit)
    j = exits[k].argmax(axis=1)
    lo, hi = radii[j - 1], radii[j]
    d = dirs[k]
    # bisect all rays at once
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        ins = brute_force_membership(spec, point[None, :] + mid[:, None] * d)
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    return float(hi.min())


def in_positive_distance_interior(spec: SupportSpec, points, rho: float, n_ring: int = 64) -> np.ndarray:
    """Points whose closed ``rho``-disk lies in the support (dense ring sampling)."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    ok = brute_force_membership(spec, p)
    th = np.linspace(0.0, TWO_PI, n_ring, endpoint=False)
    for frac in (0.999999, 0.75, 0.5, 0.25):
        ring = frac * rho * np.stack([np.cos(th), np.sin(th)], axis=1)
        for off in ring:
            ok &= brute_force_membership(spec, p + off)
    return ok


# ---------------------------------------------------------------------------
# random scenarios


def random_dirset(rng: np.random.Generator, max_arcs: int = 3) -> DirectionSet:
    """A random direction set: empty, arcs, point-arcs, occasionally near-full."""
    k = int(rng.integers(0, max_arcs + 1))
    out = DirectionSet.empty()
    for _ in range(k):
        start = rng.uniform(0.0, TWO_PI)
        if rng.random() < 0.25:
            out = out | DirectionSet.point(start)
        else:
            out = out | DirectionSet.arc(start, start + rng.uniform(0.01, 2.0))
    return out


def random_scenario(rng: np.random.Generator) -> dict:
    """Random direction sets and speeds satisfying ``0 < c_uv < c_u``."""
    c_u = float(rng.uniform(0.5, 5.0))
    c_v = float(rng.uniform(0.5, 5.0))
    c_uv = float(rng.uniform(0.05, 0.95)) * c_u
    return {
        "U": random_dirset(rng),
        "V": random_dirset(rng),
        "c_u": c_u,
        "c_v": c_v,
        "c_uv": c_uv,
        "e": float(rng.uniform(0.0, TWO_PI)),
    }
