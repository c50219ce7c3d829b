"""Hypothesis checks for the spreading theorems, with witnesses on failure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .directions import TWO_PI, DirectionSet, as_angle, normalize_angle
from .profiles import SpeedProfile, projection_candidates
from .shapes import SupportSpec, bounded_directions, positive_distance_interior, unbounded_directions

CONDITION_IDS = ("BUS", "PATH_U", "PATH_V", "STARSHAPE", "CA", "A1", "A2")


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDABLE = "undecidable-at-tolerance"


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    verdict: Verdict
    witnesses: tuple = ()
    tolerance: float = 0.0
    note: str = ""

    def __post_init__(self):
        if self.condition not in CONDITION_IDS:
            raise ValueError(f"unknown condition id {self.condition!r}")
        object.__setattr__(self, "verdict", Verdict(self.verdict))
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        if self.verdict is Verdict.FAILS and not self.witnesses:
            raise ValueError("a failing report needs at least one witness")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def summary(self) -> str:
        wit = ""
        if self.witnesses:
            shown = ", ".join(_fmt_witness(w) for w in self.witnesses[:5])
            more = f" (+{len(self.witnesses) - 5} more)" if len(self.witnesses) > 5 else ""
            wit = f" witnesses: {shown}{more}"
        note = f" [{self.note}]" if self.note else ""
        return f"{self.condition}: {self.verdict.value}{wit}{note}"


def _fmt_witness(w) -> str:
    if isinstance(w, str):
        return w
    if np.ndim(w) == 0:
        return f"{float(w):.6g} rad"
    return "(" + ", ".join(f"{float(x):.6g}" for x in np.ravel(w)) + ")"


def check_direction_cover(spec: SupportSpec, rho: float, condition: str = "BUS") -> ConditionReport:
    """Every direction is bounded for the support or unbounded for its rho-interior."""
    inner = positive_distance_interior(spec, rho)
    if inner is None:
        return ConditionReport(condition, Verdict.FAILS, ("U_rho empty",), note=f"rho={rho}")
    covered = bounded_directions(spec) | unbounded_directions(inner)
    gaps = covered.complement()
    if gaps.is_empty:
        return ConditionReport(condition, Verdict.HOLDS, note=f"rho={rho}")
    return ConditionReport(condition, Verdict.FAILS, tuple(a.midpoint() for a in gaps.arcs), note=f"rho={rho}")


def _path_points(e_vec: np.ndarray, target: np.ndarray, samples: int) -> np.ndarray:
    lam = np.linspace(0.0, 1.0, samples)
    pts = (1.0 - lam)[:, None] * e_vec[None, :] + lam[:, None] * target[None, :]
    return pts[np.hypot(pts[:, 0], pts[:, 1]) > 1e-14]


def check_path_condition(e, dirset: DirectionSet, prof_a: SpeedProfile, prof_b: SpeedProfile,
                         samples: int = 64, condition: str = "PATH_U") -> ConditionReport:
    """``prof_a > prof_b`` along a projection path of ``e`` onto ``R+ dirset U {0}``."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    t = as_angle(e)
    e_vec = np.array([math.cos(t), math.sin(t)])
    first_bad = None
    for target in projection_candidates(t, dirset):
        pts = _path_points(e_vec, target, samples)
        angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), TWO_PI)
        bad = [a for a in angles if not prof_a(a) > prof_b(a)]
        if not bad:
            return ConditionReport(condition, Verdict.HOLDS, note=f"e={t:.6g}")
        first_bad = first_bad or bad[0]
    return ConditionReport(condition, Verdict.FAILS, (float(first_bad),), note=f"e={t:.6g}")


def check_star_shaped(region: DirectionSet, dirset: DirectionSet, samples: int = 720,
                      path_samples: int = 32) -> ConditionReport:
    """Star-shapedness of the cone ``R+ region U {0}`` with respect to ``R+ dirset U {0}``.

    The region is a cone, so checking unit-radius points covers every radius.
    """
    if region.is_empty:
        return ConditionReport("STARSHAPE", Verdict.HOLDS, note="empty region")
    thetas = region.sample(samples)
    witnesses = []
    for t in thetas:
        if not region.contains(t):
            continue
        e_vec = np.array([math.cos(t), math.sin(t)])
        ok = False
        for target in projection_candidates(t, dirset):
            pts = _path_points(e_vec, target, path_samples)
            angles = np.arctan2(pts[:, 1], pts[:, 0])
            if all(region.contains(a) for a in angles):
                ok = True
                break
        if not ok:
            witnesses.append(e_vec)
    if witnesses:
        return ConditionReport("STARSHAPE", Verdict.FAILS, tuple(witnesses), note="sampling-based")
    return ConditionReport("STARSHAPE", Verdict.HOLDS, note="sampling-based")


def region_where_greater(prof_a: SpeedProfile, prof_b: SpeedProfile, n: int = 4096) -> DirectionSet:
    """Open directions where ``prof_a > prof_b``, i.e. the cone ``R+(W_a \\ closure(W_b))``."""
    from .profiles import dominance_set

    return dominance_set(prof_b, prof_a, n).complement()


def _classify(a: np.ndarray, b: np.ndarray, tol: float):
    both_inf = np.isinf(a) & np.isinf(b)
    with np.errstate(invalid="ignore"):
        diff = np.where(both_inf, 0.0, a - b)
        scale = np.where(both_inf, 1.0, np.maximum(1.0, np.maximum(np.abs(np.where(np.isinf(a), 0, a)),
                                                                    np.abs(np.where(np.isinf(b), 0, b)))))
    diff = np.where(np.isinf(a) & ~both_inf, np.inf, diff)
    diff = np.where(np.isinf(b) & ~both_inf, -np.inf, diff)
    eq = np.abs(diff) <= tol * scale
    cls = np.where(eq, 0, np.sign(diff)).astype(int)
    return cls, diff


def check_strict_dominance_closure(prof_u: SpeedProfile, prof_v: SpeedProfile, samples: int = 4096,
                                   tol: float = 1e-9) -> ConditionReport:
    """Closure of ``{w_u > w_v}`` equals ``{w_u >= w_v}`` at the sampling resolution."""
    if samples < 64:
        raise ValueError("samples must be >= 64")
    thetas = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    cls, diff = _classify(prof_u.values(thetas), prof_v.values(thetas), tol)
    eq = np.flatnonzero(cls == 0)
    if eq.size == 0:
        return ConditionReport("CA", Verdict.HOLDS, tolerance=tol, note="equality set empty")
    n = samples
    isolated = [i for i in eq if cls[(i - 1) % n] != 1 and cls[(i + 1) % n] != 1]
    if not isolated:
        return ConditionReport("CA", Verdict.HOLDS, tolerance=tol)
    witnesses = tuple(float(thetas[i]) for i in isolated)
    if all(diff[i] != 0.0 for i in isolated):
        return ConditionReport("CA", Verdict.UNDECIDABLE, witnesses, tolerance=tol,
                               note="equality only within tolerance")
    return ConditionReport("CA", Verdict.FAILS, witnesses, tolerance=tol)


__all__ = [
    "Verdict", "ConditionReport", "check_direction_cover", "check_path_condition", "check_star_shaped",
    "check_strict_dominance_closure", "region_where_greater", "normalize_angle",
]
