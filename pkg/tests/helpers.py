"""Shared helpers for the test suite: rank statistics and function builders."""

import numpy as np

from fdepth.core import Grid, GridFunction


def ranks(x) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    r = np.empty(x.size, dtype=float)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        r[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return r


def spearman(a, b) -> float:
    """Spearman rank correlation with average ranks for ties."""
    ra = ranks(a)
    rb = ranks(b)
    ra = ra - ra.mean()
    rb = rb - rb.mean()
    denom = np.sqrt((ra @ ra) * (rb @ rb))
    if denom == 0.0:
        return 1.0
    return float((ra @ rb) / denom)


def grid_fn(grid: Grid, fn) -> GridFunction:
    """GridFunction from a vectorized callable evaluated on the grid."""
    return GridFunction(grid, fn(grid.points))
