"""Subsets of the unit circle built from finitely many arcs.

Angles are radians.  Internally a set is stored as sorted, disjoint pieces of
the half-open line ``[0, 2*pi)``; an arc crossing angle 0 is split in two and
re-joined when arcs are listed.  Every endpoint carries its own closedness flag
so that complements (open arcs) and single excluded directions are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
# endpoints closer than this are identified
EPS = 1e-12


def normalize_angle(theta: float) -> float:
    """Map an angle to ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI - EPS:
        t = 0.0
    return t


def angle_of(vec) -> float:
    return normalize_angle(math.atan2(float(vec[1]), float(vec[0])))


def unit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def as_angle(e) -> float:
    """Accept either an angle or a 2-vector and return a normalized angle."""
    if np.ndim(e) == 0:
        return normalize_angle(float(e))
    return angle_of(e)


def circular_distance(a, b):
    """Geodesic distance on the circle, in ``[0, pi]``; works on arrays."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b), TWO_PI))
    return np.minimum(d, TWO_PI - d)


def _cdist(a: float, b: float) -> float:
    d = abs(math.fmod(a - b, TWO_PI))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc from ``start`` spanning ``width`` radians."""

    start: float
    width: float
    closed_start: bool = True
    closed_end: bool = True

    @property
    def end(self) -> float:
        return self.start + self.width

    @property
    def is_point(self) -> bool:
        return self.width <= EPS

    def midpoint(self) -> float:
        return normalize_angle(self.start + 0.5 * self.width)


# piece = (lo, hi, lo_closed, hi_closed) with 0 <= lo <= hi <= 2*pi
_Piece = tuple


def _merge(pieces: Iterable[_Piece]) -> tuple:
    items = []
    for lo, hi, lc, hc in pieces:
        if hi - lo <= EPS:
            if lc and hc:
                items.append((lo, lo, True, True))
            continue
        items.append((lo, hi, lc, hc))
    if not items:
        return ()
    items.sort(key=lambda p: (p[0], not p[2]))
    out = [list(items[0])]
    for lo, hi, lc, hc in items[1:]:
        cur = out[-1]
        touching = abs(lo - cur[1]) <= EPS
        if lo < cur[1] - EPS or (touching and (cur[3] or lc)):
            if abs(lo - cur[0]) <= EPS:
                cur[2] = cur[2] or lc
            if hi > cur[1] + EPS:
                cur[1], cur[3] = hi, hc
            elif abs(hi - cur[1]) <= EPS:
                cur[3] = cur[3] or hc
        else:
            out.append([lo, hi, lc, hc])
    # angle 2*pi is represented by 0; a piece can never own it
    if out[-1][1] >= TWO_PI - EPS:
        out[-1][1], out[-1][3] = TWO_PI, False
    return tuple(tuple(p) for p in out)


class DirectionSet:
    """Finite union of arcs on the unit circle.

    Construct with :meth:`from_arcs` (closed arcs), :meth:`point`,
    :meth:`empty` or :meth:`full`.  Instances are immutable.
    """

    __slots__ = ("_pieces",)

    def __init__(self, pieces: Iterable[_Piece] = ()):
        object.__setattr__(self, "_pieces", _merge(pieces))

    def __setattr__(self, name, value):
        raise AttributeError("DirectionSet is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def empty(cls) -> "DirectionSet":
        return cls(())

    @classmethod
    def full(cls) -> "DirectionSet":
        return cls([(0.0, TWO_PI, True, False)])

    @classmethod
    def point(cls, theta: float) -> "DirectionSet":
        t = normalize_angle(theta)
        return cls([(t, t, True, True)])

    @classmethod
    def arc(cls, lo: float, hi: float, closed_lo: bool = True, closed_hi: bool = True) -> "DirectionSet":
        """Arc running counter-clockwise from ``lo`` to ``hi`` (``hi >= lo``)."""
        width = hi - lo
        if width < -EPS:
            raise ValueError(f"arc end {hi} precedes start {lo}")
        if width >= TWO_PI - EPS:
            if closed_lo or closed_hi or width > TWO_PI + EPS:
                return cls.full()
            # open arc of full width: circle minus one point
            return cls.full().difference(cls.point(lo))
        s = normalize_angle(lo)
        e = s + max(width, 0.0)
        if e <= TWO_PI + EPS and e < TWO_PI - EPS:
            return cls([(s, e, closed_lo, closed_hi)])
        e -= TWO_PI
        if abs(e) <= EPS:
            return cls([(s, TWO_PI, closed_lo, False), (0.0, 0.0, closed_hi, closed_hi)])
        return cls([(s, TWO_PI, closed_lo, False), (0.0, e, True, closed_hi)])

    @classmethod
    def from_arcs(cls, arcs: Iterable[Sequence[float]]) -> "DirectionSet":
        """Union of closed arcs given as ``(lo, hi)`` pairs."""
        out = cls.empty()
        for lo, hi in arcs:
            out = out | cls.arc(lo, hi)
        return out

    # -- algebra ------------------------------------------------------
    def union(self, other: "DirectionSet") -> "DirectionSet":
        return DirectionSet(self._pieces + other._pieces)

    __or__ = union

    def complement(self) -> "DirectionSet":
        gaps = []
        cursor, cursor_closed = 0.0, True
        for lo, hi, lc, hc in self._pieces:
            gaps.append((cursor, lo, cursor_closed, not lc))
            cursor, cursor_closed = hi, not hc
        if cursor < TWO_PI - EPS:
            gaps.append((cursor, TWO_PI, cursor_closed, False))
        return DirectionSet(gaps)

    def intersection(self, other: "DirectionSet") -> "DirectionSet":
        return (self.complement() | other.complement()).complement()

    __and__ = intersection

    def difference(self, other: "DirectionSet") -> "DirectionSet":
        return self & other.complement()

    __sub__ = difference

    def closure(self) -> "DirectionSet":
        pieces = [(lo, hi, True, hi < TWO_PI) for lo, hi, _, _ in self._pieces]
        if any(hi >= TWO_PI for _, hi, _, _ in self._pieces):
            pieces.append((0.0, 0.0, True, True))
        return DirectionSet(pieces)

    def interior(self) -> "DirectionSet":
        return self.complement().closure().complement()

    # -- predicates ---------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self._pieces

    @property
    def is_full(self) -> bool:
        p = self._pieces
        return len(p) == 1 and p[0][0] == 0.0 and p[0][2] and p[0][1] >= TWO_PI

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectionSet):
            return NotImplemented
        if len(self._pieces) != len(other._pieces):
            return False
        return all(
            abs(a[0] - b[0]) <= EPS and abs(a[1] - b[1]) <= EPS and a[2] == b[2] and a[3] == b[3]
            for a, b in zip(self._pieces, other._pieces)
        )

    def __hash__(self):
        return hash(tuple((round(lo, 9), round(hi, 9), lc, hc) for lo, hi, lc, hc in self._pieces))

    def contains(self, theta) -> bool:
        t = as_angle(theta)
        for lo, hi, lc, hc in self._pieces:
            if abs(t - lo) <= EPS:
                return lc
            if abs(t - hi) <= EPS:
                return hc
            if lo < t < hi:
                return True
        return False

    __contains__ = contains

    def contains_many(self, thetas) -> np.ndarray:
        """Vectorized :meth:`contains`."""
        t = np.mod(np.asarray(thetas, dtype=float), TWO_PI)
        t = np.where(t >= TWO_PI - EPS, 0.0, t)
        out = np.zeros(t.shape, dtype=bool)
        decided = np.zeros(t.shape, dtype=bool)
        for lo, hi, lc, hc in self._pieces:
            at_lo = ~decided & (np.abs(t - lo) <= EPS)
            out |= at_lo & lc
            decided |= at_lo
            at_hi = ~decided & (np.abs(t - hi) <= EPS)
            out |= at_hi & hc
            decided |= at_hi
            out |= ~decided & (t > lo) & (t < hi)
        return out

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi, _, _ in self._pieces)

    # -- arcs and distances ------------------------------------------
    @property
    def pieces(self) -> tuple:
        return self._pieces

    @property
    def arcs(self) -> list[Arc]:
        """Maximal arcs, wrap-around joined, sorted by start angle."""
        p = [list(x) for x in self._pieces]
        if not p:
            return []
        if self.is_full:
            return [Arc(0.0, TWO_PI)]
        if len(p) > 1 and p[0][0] == 0.0 and p[0][2] and p[-1][1] >= TWO_PI:
            first = p.pop(0)
            p[-1][1] = TWO_PI + first[1]
            p[-1][3] = first[3]
        arcs = [Arc(lo, hi - lo, lc, hc) for lo, hi, lc, hc in p]
        return sorted(arcs, key=lambda a: a.start)

    def endpoints(self) -> list[float]:
        pts = set()
        for a in self.arcs:
            if a.width < TWO_PI:
                pts.add(normalize_angle(a.start))
                pts.add(normalize_angle(a.end))
        return sorted(pts)

    def gap(self, theta: float) -> float:
        """Angular distance from ``theta`` to the closure of the set."""
        if not self._pieces:
            return math.inf
        t = as_angle(theta)
        best = math.inf
        for lo, hi, _, _ in self._pieces:
            if lo - EPS <= t <= hi + EPS:
                return 0.0
            best = min(best, _cdist(t, lo), _cdist(t, hi))
        return best

    def gaps(self, thetas) -> np.ndarray:
        """Vectorized :meth:`gap`."""
        t = np.mod(np.asarray(thetas, dtype=float), TWO_PI)
        if not self._pieces:
            return np.full(t.shape, np.inf)
        best = np.full(t.shape, np.inf)
        for lo, hi, _, _ in self._pieces:
            inside = (t >= lo - EPS) & (t <= hi + EPS)
            d = np.minimum(circular_distance(t, lo), circular_distance(t, hi))
            best = np.minimum(best, np.where(inside, 0.0, d))
        return best

    def nearest(self, theta: float) -> list[float]:
        """Closest points of the closure to ``theta``, sorted by normalized angle."""
        if not self._pieces:
            return []
        t = as_angle(theta)
        g = self.gap(t)
        if g == 0.0:
            return [t]
        cands = sorted({normalize_angle(x) for x in self.endpoints() if abs(_cdist(t, x) - g) <= EPS})
        return cands

    def sample(self, n: int) -> np.ndarray:
        """Uniform angular samples inside the arcs, endpoints included."""
        arcs = self.arcs
        if not arcs:
            return np.empty(0)
        total = sum(a.width for a in arcs)
        out = []
        for a in arcs:
            if a.is_point:
                out.append(np.array([a.start]))
                continue
            k = max(2, int(round(n * a.width / total)) if total > 0 else 2)
            out.append(np.linspace(a.start, a.start + a.width, k))
        return np.mod(np.concatenate(out), TWO_PI)

    def __repr__(self) -> str:
        if self.is_empty:
            return "DirectionSet(empty)"
        if self.is_full:
            return "DirectionSet(full)"
        parts = []
        for a in self.arcs:
            lb = "[" if a.closed_start else "("
            rb = "]" if a.closed_end else ")"
            parts.append(f"{lb}{a.start:.6g}, {a.end:.6g}{rb}")
        return "DirectionSet(" + " U ".join(parts) + ")"

    def to_rows(self) -> list[tuple]:
        return [(a.start, a.end, a.closed_start, a.closed_end) for a in self.arcs]
