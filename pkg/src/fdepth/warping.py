"""Elastic alignment: SRVF transform, optimal warping, and phase distances.

Alignment works on square-root velocity functions (SRVFs), where warping
acts by ``(q o gamma) sqrt(gamma')`` and the L2 distance is warping
invariant. The optimal warping between two functions is found by dynamic
programming over monotone lattice paths whose per-edge slopes lie in
[1/5, 5]; ties (for example between two constants) are broken toward the
identity. Two scalar criteria summarize a warping function: its L2 distance
to the identity, and the Fisher-Rao phase distance
``arccos(integral sqrt(gamma'))``, which reacts strongly to local slope
changes and hence to noise.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._jacobi import njit
from .core import Grid, GridFunction, FunctionalSample, GridMismatchError, derivative, lp_norm

__all__ = [
    "WarpingFunction",
    "srvf",
    "optimal_warping",
    "warping_objective",
    "karcher_mean",
    "warp_l2_distance",
    "fisher_rao_distance",
]

# Positivity floor for gamma' before square roots.
_SLOPE_FLOOR = 1e-12

# Monotone DP steps (dj, di) with coprime entries up to 5; slopes di/dj
# then cover [1/5, 5].
_STEPS = np.array(
    [
        (1, 1),
        (1, 2), (2, 1),
        (1, 3), (3, 1),
        (2, 3), (3, 2),
        (1, 4), (4, 1),
        (3, 4), (4, 3),
        (1, 5), (5, 1),
        (2, 5), (5, 2),
        (3, 5), (5, 3),
        (4, 5), (5, 4),
    ],
    dtype=np.int64,
)

_INF = 1e300


class WarpingFunction:
    """A strictly increasing reparameterization of a grid's interval.

    ``values[k]`` is ``gamma(t_k)``; the boundary values equal the interval
    endpoints exactly.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != (grid.m,):
            raise ValueError(f"expected {grid.m} values, got shape {vals.shape}")
        if vals[0] != grid.t0 or vals[-1] != grid.t1:
            raise ValueError("warping must fix the interval endpoints exactly")
        if np.any(np.diff(vals) <= 0):
            raise ValueError("warping values must be strictly increasing")
        self.grid = grid
        self.values = vals

    @classmethod
    def identity(cls, grid: Grid) -> "WarpingFunction":
        return cls(grid, grid.points.copy())

    def as_grid_function(self) -> GridFunction:
        return GridFunction(self.grid, self.values)

    def inverse(self) -> "WarpingFunction":
        """Inverse warping, by linear interpolation of the swapped graph."""
        inv = np.interp(self.grid.points, self.values, self.grid.points)
        inv[0] = self.grid.t0
        inv[-1] = self.grid.t1
        return WarpingFunction(self.grid, inv)

    def __repr__(self) -> str:
        return f"WarpingFunction({self.grid!r})"


def srvf(f: GridFunction) -> GridFunction:
    """Square-root velocity function ``sign(f') sqrt(|f'|)``."""
    df = derivative(f, 1).values
    return GridFunction(f.grid, np.sign(df) * np.sqrt(np.abs(df)))


@njit(cache=True, nogil=True)
def _dp_tables(qu, qv, dt, steps):  # pragma: no cover - exercised via wrapper
    m = qu.shape[0]
    nsteps = steps.shape[0]
    cost = np.full((m, m), _INF)
    diag = np.full((m, m), _INF)
    pred = np.full((m, m), -1, dtype=np.int64)
    cost[0, 0] = 0.0
    diag[0, 0] = 0.0
    for j in range(1, m):
        for i in range(1, m):
            best = _INF
            best_diag = _INF
            best_k = -1
            for k in range(nsteps):
                dj = steps[k, 0]
                di = steps[k, 1]
                j0 = j - dj
                i0 = i - di
                if j0 < 0 or i0 < 0:
                    continue
                if cost[j0, i0] >= _INF:
                    continue
                sl = di / dj
                sq = math.sqrt(sl)
                c = 0.0
                dd = 0.0
                for step in range(dj + 1):
                    tpos = j0 + step
                    gpos = i0 + sl * step
                    ilo = int(gpos)
                    if ilo >= m - 1:
                        quv = qu[m - 1]
                    else:
                        frac = gpos - ilo
                        quv = qu[ilo] * (1.0 - frac) + qu[ilo + 1] * frac
                    resid = quv * sq - qv[tpos]
                    w = 0.5 if (step == 0 or step == dj) else 1.0
                    c += w * resid * resid
                    dd += w * abs(gpos - tpos)
                total_c = cost[j0, i0] + c * dt
                total_d = diag[j0, i0] + dd * dt
                if total_c < best or (total_c == best and total_d < best_diag):
                    best = total_c
                    best_diag = total_d
                    best_k = k
            cost[j, i] = best
            diag[j, i] = best_diag
            pred[j, i] = best_k
    return cost, diag, pred


def _trace_path(pred: np.ndarray, m: int) -> np.ndarray:
    """Fractional gamma indices at every grid point, from the DP tables."""
    gidx = np.empty(m)
    j, i = m - 1, m - 1
    gidx[-1] = m - 1
    while j > 0:
        k = pred[j, i]
        if k < 0:
            raise RuntimeError("DP table has no path; this should be impossible")
        dj = int(_STEPS[k, 0])
        di = int(_STEPS[k, 1])
        j0, i0 = j - dj, i - di
        sl = di / dj
        for step in range(dj):
            gidx[j0 + step] = i0 + sl * step
        j, i = j0, i0
    gidx[0] = 0.0
    return gidx


def optimal_warping(u: GridFunction, v: GridFunction) -> WarpingFunction:
    """The warping minimizing ``||(q_u o gamma) sqrt(gamma') - q_v||_2``.

    Dynamic programming over all monotone lattice paths with per-edge slopes
    in [1/5, 5]. Among equal-cost paths the one closest to the diagonal
    wins, so aligning a function to itself (or two constants) returns the
    identity. The objective at the returned warping never exceeds the
    objective at the identity, which is itself a lattice path.
    """
    if u.grid != v.grid:
        raise GridMismatchError("functions must share a grid to be aligned")
    grid = u.grid
    qu = srvf(u).values
    qv = srvf(v).values
    _, _, pred = _dp_tables(qu, qv, grid.dt, _STEPS)
    gidx = _trace_path(pred, grid.m)
    values = grid.t0 + gidx * grid.dt
    values[0] = grid.t0
    values[-1] = grid.t1
    return WarpingFunction(grid, values)


def warping_objective(u: GridFunction, v: GridFunction, gamma: WarpingFunction) -> float:
    """Alignment cost ``||(q_u o gamma) sqrt(gamma') - q_v||_2^2`` of a warping.

    Uses per-interval slopes of ``gamma`` and the same quadrature as the DP
    search, so the value is directly comparable to what ``optimal_warping``
    minimized.
    """
    if u.grid != v.grid or gamma.grid != u.grid:
        raise GridMismatchError("functions and warping must share a grid")
    grid = u.grid
    qu = srvf(u).values
    qv = srvf(v).values
    gv = gamma.values
    slopes = np.diff(gv) / grid.dt
    qug = np.interp(gv, grid.points, qu)
    total = 0.0
    for k in range(grid.m - 1):
        sq = math.sqrt(max(slopes[k], _SLOPE_FLOOR))
        left = qug[k] * sq - qv[k]
        right = qug[k + 1] * sq - qv[k + 1]
        total += 0.5 * (left * left + right * right) * grid.dt
    return total


def warp_l2_distance(gamma: WarpingFunction) -> float:
    """L2 distance of a warping from the identity."""
    return lp_norm(GridFunction(gamma.grid, gamma.values - gamma.grid.points), 2)


def fisher_rao_distance(gamma: WarpingFunction) -> float:
    """Fisher-Rao phase distance ``arccos(mean of sqrt(gamma'))``.

    The derivative comes from the second-order finite differences of
    :func:`fdepth.core.derivative` with a positivity floor of 1e-12, and the
    arccos argument is clamped to [-1, 1]. On the unit interval this is
    ``arccos(integral sqrt(gamma'))``; on a general interval the integral is
    normalized by the interval length so the identity still maps to 0.
    """
    grid = gamma.grid
    dgamma = derivative(gamma.as_grid_function(), 1).values
    root = np.sqrt(np.maximum(dgamma, _SLOPE_FLOOR))
    mean = float(grid.weights @ root) / (grid.t1 - grid.t0)
    return math.acos(min(1.0, max(-1.0, mean)))


def _integrate_srvf(q: np.ndarray, grid: Grid, f0: float) -> np.ndarray:
    """Recover function values from an SRVF by cumulative trapezoid."""
    speed = q * np.abs(q)
    inc = 0.5 * (speed[:-1] + speed[1:]) * grid.dt
    vals = np.empty(grid.m)
    vals[0] = f0
    vals[1:] = f0 + np.cumsum(inc)
    return vals


def _compose(f_vals: np.ndarray, gamma_vals: np.ndarray, grid: Grid) -> np.ndarray:
    """Values of ``f o gamma`` by linear interpolation."""
    return np.interp(gamma_vals, grid.points, f_vals)


def _mean_warping(warpings: list[WarpingFunction], grid: Grid) -> WarpingFunction:
    vals = np.mean([g.values for g in warpings], axis=0)
    vals[0] = grid.t0
    vals[-1] = grid.t1
    return WarpingFunction(grid, vals)


def _worker_count() -> int:
    raw = os.environ.get("FDEPTH_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        count = 1
    return max(1, count)


def _align_all(sample: FunctionalSample, template: GridFunction) -> list[WarpingFunction]:
    """Optimal warpings of every sample function to the template.

    Runs the independent alignments on up to FDEPTH_THREADS threads; the
    result list is ordered by sample index either way, so the output does
    not depend on the worker count.
    """
    workers = min(_worker_count(), sample.n)
    if workers <= 1:
        return [optimal_warping(f, template) for f in sample]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: optimal_warping(f, template), sample))


def karcher_mean(
    sample: FunctionalSample,
    max_iter: int = 20,
    tol: float = 1e-4,
) -> tuple[GridFunction, list[WarpingFunction]]:
    """Elastic template and per-observation warpings to it.

    Iteratively aligns all functions to the current template, replaces the
    template by the cross-sectional mean of the aligned SRVFs, and recenters
    so the mean warping stays near the identity. Stops when the SRVF-L2
    template change drops below ``tol`` (a warning is emitted if ``max_iter``
    is reached first; the last iterate is still returned).

    Returns
    -------
    (template, warpings)
        The template as a function, and the optimal warping of each sample
        function to it.
    """
    if sample.n < 2:
        raise ValueError("need at least 2 functions for a Karcher mean")
    grid = sample.grid
    f0 = float(sample.values[:, 0].mean())
    qs = np.vstack([srvf(f).values for f in sample])
    template_q = qs.mean(axis=0)
    template = GridFunction(grid, _integrate_srvf(template_q, grid, f0))

    converged = False
    for _ in range(max_iter):
        warpings = _align_all(sample, template)
        aligned = np.empty_like(qs)
        for i, gam in enumerate(warpings):
            dgam = np.maximum(derivative(gam.as_grid_function(), 1).values, _SLOPE_FLOOR)
            aligned[i] = _compose(qs[i], gam.values, grid) * np.sqrt(dgam)
        new_q = aligned.mean(axis=0)
        new_vals = _integrate_srvf(new_q, grid, f0)
        # recenter: pull the template back by the inverse mean warping
        ginv = _mean_warping(warpings, grid).inverse()
        new_vals = _compose(new_vals, ginv.values, grid)
        new_template = GridFunction(grid, new_vals)
        new_template_q = srvf(new_template).values
        change = lp_norm(GridFunction(grid, new_template_q - template_q), 2)
        template = new_template
        template_q = new_template_q
        if change < tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"Karcher mean did not converge in {max_iter} iterations; "
            "returning the last iterate",
            RuntimeWarning,
            stacklevel=2,
        )
    warpings = _align_all(sample, template)
    return template, warpings
