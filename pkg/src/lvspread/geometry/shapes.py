"""Symbolic planar shapes used as initial supports.

Every shape is an immutable dataclass.  Only the asymptotic geometry lives
here (bounded/unbounded directions, positive-distance interior); exact point
membership and distances are in :mod:`lvspread.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import ValidationError
from .directions import TWO_PI, DirectionSet, angle_of, normalize_angle

_UNIT_TOL = 1e-6


def _vec(x, path, name) -> tuple[float, float]:
    try:
        a, b = (float(c) for c in x)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a pair of numbers, got {x!r}", path) from None
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError(f"{name} must be finite", path)
    return (a, b)


def _unit_vec(x, path, name) -> tuple[float, float]:
    a, b = _vec(x, path, name)
    n = math.hypot(a, b)
    if abs(n - 1.0) > _UNIT_TOL:
        raise ValidationError(f"{name} must be a unit vector (|{name}| = {n:.6g})", path)
    return (a / n, b / n)


def _positive(x, path, name) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number", path) from None
    if not (v > 0 and math.isfinite(v)):
        raise ValidationError(f"{name} must be > 0, got {x!r}", path)
    return v


class SupportSpec:
    """Base class of the shape algebra."""

    kind: str = ""

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(SupportSpec):
    """Closed disk."""

    center: tuple[float, float]
    radius: float
    kind = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "ball", "center"))
        object.__setattr__(self, "radius", _positive(self.radius, "ball", "radius"))

    def to_dict(self):
        return {"type": self.kind, "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class HalfPlane(SupportSpec):
    """``{x : x . normal <= offset}``."""

    normal: tuple[float, float]
    offset: float = 0.0
    kind = "half_plane"

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit_vec(self.normal, "half_plane", "normal"))
        object.__setattr__(self, "offset", float(self.offset))

    def to_dict(self):
        return {"type": self.kind, "normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class Cone(SupportSpec):
    """Open angular sector ``angle_lo < arg(x - vertex) < angle_hi``."""

    vertex: tuple[float, float]
    angle_lo: float
    angle_hi: float
    kind = "cone"

    def __post_init__(self):
        object.__setattr__(self, "vertex", _vec(self.vertex, "cone", "vertex"))
        lo, hi = float(self.angle_lo), float(self.angle_hi)
        if not (0.0 < hi - lo < TWO_PI):
            raise ValidationError(f"cone width must lie in (0, 2*pi), got {hi - lo:.6g}", "cone")
        object.__setattr__(self, "angle_lo", lo)
        object.__setattr__(self, "angle_hi", hi)

    @property
    def width(self) -> float:
        return self.angle_hi - self.angle_lo

    @property
    def bisector(self) -> np.ndarray:
        m = 0.5 * (self.angle_lo + self.angle_hi)
        return np.array([math.cos(m), math.sin(m)])

    def to_dict(self):
        return {"type": self.kind, "vertex": list(self.vertex), "angle_lo": self.angle_lo, "angle_hi": self.angle_hi}


@dataclass(frozen=True)
class Strip(SupportSpec):
    """``{x : |x . normal| <= half_width}``."""

    normal: tuple[float, float]
    half_width: float
    kind = "strip"

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit_vec(self.normal, "strip", "normal"))
        object.__setattr__(self, "half_width", _positive(self.half_width, "strip", "half_width"))

    def to_dict(self):
        return {"type": self.kind, "normal": list(self.normal), "half_width": self.half_width}


@dataclass(frozen=True)
class BallChain(SupportSpec):
    """Balls of equal radius centred at ``ratio**n * direction`` for ``n < count``.

    With ``infinite=True`` the asymptotic geometry is that of the unending chain:
    ``direction`` is then neither bounded nor unbounded.  Point membership always
    uses the ``count`` balls.
    """

    direction: tuple[float, float]
    radius: float
    ratio: float
    count: int
    infinite: bool = False
    kind = "ball_chain"

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit_vec(self.direction, "ball_chain", "direction"))
        object.__setattr__(self, "radius", _positive(self.radius, "ball_chain", "radius"))
        ratio = _positive(self.ratio, "ball_chain", "ratio")
        if ratio <= 1.0:
            raise ValidationError(f"ratio must be > 1, got {ratio}", "ball_chain")
        object.__setattr__(self, "ratio", ratio)
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError(f"count must be a positive integer, got {self.count!r}", "ball_chain")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "infinite", bool(self.infinite))

    def centers(self) -> np.ndarray:
        n = np.arange(self.count, dtype=float)
        return (self.ratio ** n)[:, None] * np.asarray(self.direction)[None, :]

    def to_dict(self):
        return {"type": self.kind, "direction": list(self.direction), "radius": self.radius,
                "ratio": self.ratio, "count": self.count, "infinite": self.infinite}


@dataclass(frozen=True)
class Union(SupportSpec):
    """Union of members; an empty member list denotes the empty set."""

    members: tuple = field(default_factory=tuple)
    kind = "union"

    def __post_init__(self):
        members = tuple(self.members)
        for i, m in enumerate(members):
            if not isinstance(m, SupportSpec):
                raise ValidationError(f"member {i} is not a shape", "union")
        object.__setattr__(self, "members", members)

    def to_dict(self):
        return {"type": self.kind, "members": [m.to_dict() for m in self.members]}


@dataclass(frozen=True)
class Translate(SupportSpec):
    inner: SupportSpec
    shift: tuple[float, float]
    kind = "translate"

    def __post_init__(self):
        if not isinstance(self.inner, SupportSpec):
            raise ValidationError("inner is not a shape", "translate")
        object.__setattr__(self, "shift", _vec(self.shift, "translate", "shift"))

    def to_dict(self):
        return {"type": self.kind, "inner": self.inner.to_dict(), "shift": list(self.shift)}


@dataclass(frozen=True)
class Complement(SupportSpec):
    """Everything outside ``inner``; used for complementary initial supports."""

    inner: SupportSpec
    kind = "complement"

    def __post_init__(self):
        if not isinstance(self.inner, SupportSpec):
            raise ValidationError("inner is not a shape", "complement")

    def to_dict(self):
        return {"type": self.kind, "inner": self.inner.to_dict()}


_KINDS = {c.kind: c for c in (Ball, HalfPlane, Cone, Strip, BallChain, Union, Translate, Complement)}


def spec_from_dict(data: Any, path: str = "support") -> SupportSpec:
    """Build a shape from its serialized form; errors carry the field path."""
    if not isinstance(data, dict):
        raise ValidationError(f"expected a mapping, got {type(data).__name__}", path)
    kind = data.get("type")
    if kind not in _KINDS:
        raise ValidationError(f"unknown shape type {kind!r} (expected one of {sorted(_KINDS)})", f"{path}.type")
    body = {k: v for k, v in data.items() if k != "type"}
    try:
        if kind == "union":
            members = body.get("members", [])
            if not isinstance(members, list):
                raise ValidationError("members must be a list", f"{path}.members")
            return Union(tuple(spec_from_dict(m, f"{path}.members[{i}]") for i, m in enumerate(members)))
        if kind == "translate":
            return Translate(spec_from_dict(body.get("inner"), f"{path}.inner"), body.get("shift"))
        if kind == "complement":
            return Complement(spec_from_dict(body.get("inner"), f"{path}.inner"))
        return _KINDS[kind](**body)
    except ValidationError as exc:
        if exc.path and exc.path.startswith(path):
            raise
        msg = str(exc).split(": ", 1)[-1]
        raise ValidationError(msg, path) from None
    except TypeError as exc:
        raise ValidationError(f"bad fields for {kind}: {exc}", path) from None


# ---------------------------------------------------------------------------
# asymptotic directions


def _half_circle_opposite(normal) -> DirectionSet:
    phi = angle_of(normal)
    return DirectionSet.arc(phi + 0.5 * math.pi, phi + 1.5 * math.pi)


def unbounded_directions(spec: SupportSpec) -> DirectionSet:
    """Directions along which the support stays at sublinear distance."""
    if isinstance(spec, (Ball, BallChain)):
        return DirectionSet.empty()
    if isinstance(spec, HalfPlane):
        return _half_circle_opposite(spec.normal)
    if isinstance(spec, Cone):
        return DirectionSet.arc(spec.angle_lo, spec.angle_hi)
    if isinstance(spec, Strip):
        phi = angle_of(spec.normal)
        return DirectionSet.point(phi + 0.5 * math.pi) | DirectionSet.point(phi - 0.5 * math.pi)
    if isinstance(spec, Union):
        out = DirectionSet.empty()
        for m in spec.members:
            out = out | unbounded_directions(m)
        return out
    if isinstance(spec, Translate):
        return unbounded_directions(spec.inner)
    if isinstance(spec, Complement):
        return bounded_directions(spec.inner).closure()
    raise ValidationError(f"not a shape: {spec!r}")


def bounded_directions(spec: SupportSpec) -> DirectionSet:
    """Directions along which the support stays linearly far away."""
    if isinstance(spec, BallChain):
        if spec.infinite:
            return DirectionSet.full() - DirectionSet.point(angle_of(spec.direction))
        return DirectionSet.full()
    if isinstance(spec, Union):
        out = DirectionSet.full()
        for m in spec.members:
            out = out & bounded_directions(m)
        return out
    if isinstance(spec, Translate):
        return bounded_directions(spec.inner)
    if isinstance(spec, Complement):
        return unbounded_directions(spec.inner).interior()
    return unbounded_directions(spec).complement()


# ---------------------------------------------------------------------------
# positive-distance interior and dilation


def _cone_shift(spec: Cone, rho: float, sign: float) -> Cone:
    # parallel boundary lines move by rho when the vertex slides rho/sin(w/2) along the bisector
    s = sign * rho / math.sin(0.5 * spec.width)
    v = np.asarray(spec.vertex) + s * spec.bisector
    return Cone((float(v[0]), float(v[1])), spec.angle_lo, spec.angle_hi)


def positive_distance_interior(spec: SupportSpec, rho: float) -> SupportSpec | None:
    """Shape for ``{x in spec : dist(x, boundary) >= rho}``; ``None`` when empty.

    Exact for balls, half-planes, strips, chains and convex cones.  Reflex cones,
    unions and complements return a subset with the same unbounded directions.
    """
    rho = _positive(rho, "rho", "rho")
    if isinstance(spec, Ball):
        return Ball(spec.center, spec.radius - rho) if spec.radius > rho else None
    if isinstance(spec, HalfPlane):
        return HalfPlane(spec.normal, spec.offset - rho)
    if isinstance(spec, Cone):
        return _cone_shift(spec, rho, +1.0)
    if isinstance(spec, Strip):
        return Strip(spec.normal, spec.half_width - rho) if spec.half_width > rho else None
    if isinstance(spec, BallChain):
        if spec.radius <= rho:
            return None
        return BallChain(spec.direction, spec.radius - rho, spec.ratio, spec.count, spec.infinite)
    if isinstance(spec, Union):
        members = [m for m in (positive_distance_interior(m, rho) for m in spec.members) if m is not None]
        return Union(tuple(members)) if members else None
    if isinstance(spec, Translate):
        inner = positive_distance_interior(spec.inner, rho)
        return None if inner is None else Translate(inner, spec.shift)
    if isinstance(spec, Complement):
        return Complement(dilate(spec.inner, rho))
    raise ValidationError(f"not a shape: {spec!r}")


def dilate(spec: SupportSpec, rho: float) -> SupportSpec:
    """A superset of ``spec + B_rho`` (exact except for convex cones and complements)."""
    if isinstance(spec, Ball):
        return Ball(spec.center, spec.radius + rho)
    if isinstance(spec, HalfPlane):
        return HalfPlane(spec.normal, spec.offset + rho)
    if isinstance(spec, Cone):
        return _cone_shift(spec, rho, -1.0)
    if isinstance(spec, Strip):
        return Strip(spec.normal, spec.half_width + rho)
    if isinstance(spec, BallChain):
        return BallChain(spec.direction, spec.radius + rho, spec.ratio, spec.count, spec.infinite)
    if isinstance(spec, Union):
        return Union(tuple(dilate(m, rho) for m in spec.members))
    if isinstance(spec, Translate):
        return Translate(dilate(spec.inner, rho), spec.shift)
    if isinstance(spec, Complement):
        inner = positive_distance_interior(spec.inner, rho)
        return Complement(inner if inner is not None else Union(()))
    raise ValidationError(f"not a shape: {spec!r}")


def contains_chain(spec: SupportSpec) -> bool:
    """True when an idealized ball chain occurs anywhere inside ``spec``."""
    if isinstance(spec, BallChain):
        return spec.infinite
    if isinstance(spec, Union):
        return any(contains_chain(m) for m in spec.members)
    if isinstance(spec, (Translate, Complement)):
        return contains_chain(spec.inner)
    return False


__all__ = [
    "SupportSpec", "Ball", "HalfPlane", "Cone", "Strip", "BallChain", "Union", "Translate", "Complement",
    "spec_from_dict", "unbounded_directions", "bounded_directions", "positive_distance_interior", "dilate",
    "contains_chain", "normalize_angle",
]
