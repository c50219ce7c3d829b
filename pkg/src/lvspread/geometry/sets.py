"""Spreading sets as star-shaped regions described by radial profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .directions import TWO_PI, DirectionSet
from .profiles import SpeedProfile, dominance_set, s_u_profile, speed_profile


@dataclass(frozen=True)
class SpreadingSets:
    w_u: SpeedProfile
    w_v: SpeedProfile
    w_uv: SpeedProfile
    s_u: SpeedProfile
    dominance: DirectionSet  # directions with w_u >= w_v

    @staticmethod
    def _polar(points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.hypot(p[:, 0], p[:, 1])
        th = np.mod(np.arctan2(p[:, 1], p[:, 0]), TWO_PI)
        return r, th

    def _inside(self, prof: SpeedProfile, points) -> np.ndarray:
        r, th = self._polar(points)
        return (r == 0.0) | (r < prof.values(th))

    def in_W_u(self, points):
        return self._inside(self.w_u, points)

    def in_W_v(self, points):
        return self._inside(self.w_v, points)

    def in_W_uv(self, points):
        return self._inside(self.w_uv, points)

    def in_S_u(self, points):
        return self._inside(self.s_u, points)

    def in_S_v(self, points) -> np.ndarray:
        r, th = self._polar(points)
        wu, wv, su = self.w_u.values(th), self.w_v.values(th), self.s_u.values(th)
        return (wu < wv) & (su < r) & (r < wv)

    def v_survives(self, theta: float) -> bool:
        """Whether ``S_v`` meets the ray in direction ``theta``."""
        return self.w_u(theta) < self.w_v(theta)


def spreading_sets(params, dirset_U: DirectionSet, dirset_V: DirectionSet, c_uv: float | None = None) -> SpreadingSets:
    """Assemble ``W_u, W_v, W_uv, S_u, S_v`` from the unbounded-direction sets.

    ``params`` needs ``c_u`` and ``c_v`` attributes; ``c_uv`` defaults to
    ``params.c_uv`` when present.
    """
    if c_uv is None:
        c_uv = getattr(params, "c_uv", None)
    w_u = speed_profile(dirset_U, params.c_u)
    w_v = speed_profile(dirset_V, params.c_v)
    w_uv = speed_profile(dirset_U, c_uv)
    dom = dominance_set(w_u, w_v)
    s_u = s_u_profile(w_u, w_v, c_uv, dom)
    return SpreadingSets(w_u, w_v, w_uv, s_u, dom)
