"""Compiled stepping kernel shared by the 1D front estimator and the 2D solver.

One forward-Euler step with the 5-point Laplacian and reflecting (Neumann)
ghost cells.  A 1D problem is a grid with a single row: the reflected
up/down neighbours cancel against the centre term exactly.
"""

from __future__ import annotations

import warnings

import numba
import numpy as np
from numba import njit, prange
from numba.core.errors import NumbaWarning

# an outdated system TBB is skipped in favour of OpenMP; the notice is noise
warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)


@njit(parallel=True, cache=True)
def _step_into(u, v, un, vn, lam_u, lam_v, dtr, dt, a, b):
    ny, nx = u.shape
    for j in prange(ny):
        jm = j - 1 if j > 0 else 0
        jp = j + 1 if j < ny - 1 else ny - 1
        for i in range(nx):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < nx - 1 else nx - 1
            uc = u[j, i]
            vc = v[j, i]
            # (left + right) + (down + up): exact under both mirror maps
            lu = (u[j, im] + u[j, ip]) + (u[jm, i] + u[jp, i]) - 4.0 * uc
            lv = (v[j, im] + v[j, ip]) + (v[jm, i] + v[jp, i]) - 4.0 * vc
            un[j, i] = uc + lam_u * lu + dtr * uc * (1.0 - uc - a * vc)
            vn[j, i] = vc + lam_v * lv + dt * vc * (1.0 - vc - b * uc)


@njit(cache=True)
def _advance(u, v, un, vn, nsteps, lam_u, lam_v, dtr, dt, a, b):
    for _ in range(nsteps):
        _step_into(u, v, un, vn, lam_u, lam_v, dtr, dt, a, b)
        u, un = un, u
        v, vn = vn, v
    return u, v


def advance(u: np.ndarray, v: np.ndarray, nsteps: int, h: float, dt: float,
            d: float, r: float, a: float, b: float):
    """Return ``(u, v)`` after ``nsteps`` steps.  Inputs are not modified."""
    u = np.ascontiguousarray(u, dtype=np.float64).copy()
    v = np.ascontiguousarray(v, dtype=np.float64).copy()
    if nsteps <= 0:
        return u, v
    un = np.empty_like(u)
    vn = np.empty_like(v)
    return _advance(u, v, un, vn, int(nsteps), d * dt / (h * h), dt / (h * h), dt * r, dt, a, b)


def stable_dt(h: float, d: float, r: float, a: float, b: float, dim: int = 2, safety: float = 0.8) -> float:
    """Largest explicit step kept by the solver.

    Diffusion limit ``safety*h^2/(2*dim*max(d,1))``, reaction resolution
    ``dt*r <= 0.1`` and ``dt <= 0.1``, and ``dt*max(r*a, b) <= 0.2`` so the
    update stays monotone and fields stay in [0, 1].
    """
    dt = safety * h * h / (2.0 * dim * max(d, 1.0))
    dt = min(dt, 0.1 / r, 0.1)
    comp = max(r * a, b)
    if comp > 0:
        dt = min(dt, 0.2 / comp)
    return dt


def set_threads(n: int | None) -> int:
    """Clamp and apply a thread count; returns the count in effect."""
    if n is not None:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()
