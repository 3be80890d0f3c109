"""Uniform grids, discretized functions, and basic calculus on them.

Functions are represented by their values on a uniform grid over a closed
interval. Integrals use the trapezoid rule throughout, so every norm and
inner product in the package is consistent with one quadrature. Derivatives
use second-order finite differences with one-sided stencils at the ends,
which keeps derivative-based norms free of first-order boundary artifacts.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "FunctionalSample",
    "GridMismatchError",
    "integrate",
    "lp_norm",
    "l2_inner",
    "derivative",
]

# Relative tolerance for deciding that externally supplied grid points are
# uniformly spaced.
UNIFORMITY_RTOL = 1e-9


class GridMismatchError(ValueError):
    """Raised when two objects live on different grids."""


class Grid:
    """Uniform evaluation grid with ``m`` points on ``[t0, t1]``.

    Parameters
    ----------
    t0, t1 : float
        Interval endpoints, ``t0 < t1``.
    m : int
        Number of grid points, at least 3.

    Attributes
    ----------
    points : ndarray of shape (m,)
        The grid points, ``t0`` through ``t1`` inclusive.
    dt : float
        Grid spacing.
    weights : ndarray of shape (m,)
        Trapezoid quadrature weights (``dt/2`` at the ends, ``dt`` inside).
    """

    __slots__ = ("t0", "t1", "m", "points", "dt", "weights")

    def __init__(self, t0: float, t1: float, m: int):
        t0 = float(t0)
        t1 = float(t1)
        if not np.isfinite(t0) or not np.isfinite(t1):
            raise ValueError("grid endpoints must be finite")
        if not t0 < t1:
            raise ValueError(f"need t0 < t1, got [{t0}, {t1}]")
        m = int(m)
        if m < 3:
            raise ValueError(f"need at least 3 grid points, got {m}")
        self.t0 = t0
        self.t1 = t1
        self.m = m
        self.points = np.linspace(t0, t1, m)
        self.dt = (t1 - t0) / (m - 1)
        w = np.full(m, self.dt)
        w[0] = w[-1] = self.dt / 2.0
        self.weights = w

    @classmethod
    def from_points(cls, points) -> "Grid":
        """Build a grid from explicit points, checking uniform spacing.

        Spacing must be constant to within a relative tolerance of 1e-9;
        irregular grids are rejected rather than resampled.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise ValueError("need a 1-d array of at least 3 grid points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        steps = np.diff(pts)
        if np.any(steps <= 0):
            raise ValueError("grid points must be strictly increasing")
        dt = (pts[-1] - pts[0]) / (pts.size - 1)
        if np.max(np.abs(steps - dt)) > UNIFORMITY_RTOL * max(abs(dt), 1e-300):
            raise ValueError("grid points are not uniformly spaced")
        return cls(pts[0], pts[-1], pts.size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.m == other.m
            and self.t0 == other.t0
            and self.t1 == other.t1
        )

    def __hash__(self) -> int:
        return hash((self.t0, self.t1, self.m))

    def __repr__(self) -> str:
        return f"Grid(t0={self.t0}, t1={self.t1}, m={self.m})"


def _check_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid!r} vs {b.grid!r}")


class GridFunction:
    """A real function observed on a :class:`Grid`.

    Values must be finite; functions with missing observations are rejected
    rather than imputed.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != (grid.m,):
            raise ValueError(f"expected {grid.m} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite (no missing values)")
        self.grid = grid
        self.values = vals

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)

    def __repr__(self) -> str:
        return f"GridFunction({self.grid!r}, n={self.grid.m} values)"


class FunctionalSample:
    """A collection of functions on a common grid, stored row-wise.

    Parameters
    ----------
    grid : Grid
    values : array_like of shape (n, m)
        One function per row.
    ids : sequence of str, optional
        Row identifiers; defaults to "0", "1", ...
    """

    __slots__ = ("grid", "values", "ids")

    def __init__(self, grid: Grid, values, ids=None):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != grid.m:
            raise ValueError(f"expected shape (n, {grid.m}), got {vals.shape}")
        if vals.shape[0] < 1:
            raise ValueError("sample must contain at least one function")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite (no missing values)")
        if ids is None:
            ids = [str(i) for i in range(vals.shape[0])]
        ids = [str(s) for s in ids]
        if len(ids) != vals.shape[0]:
            raise ValueError("number of ids must match number of rows")
        self.grid = grid
        self.values = vals
        self.ids = ids

    @classmethod
    def from_functions(cls, functions, ids=None) -> "FunctionalSample":
        functions = list(functions)
        if not functions:
            raise ValueError("sample must contain at least one function")
        grid = functions[0].grid
        for f in functions[1:]:
            if f.grid != grid:
                raise GridMismatchError("all functions must share one grid")
        return cls(grid, np.vstack([f.values for f in functions]), ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.values[i])

    def __iter__(self):
        for i in range(self.n):
            yield self[i]

    def mean(self) -> GridFunction:
        """Cross-sectional (pointwise) sample mean."""
        return GridFunction(self.grid, self.values.mean(axis=0))

    def __repr__(self) -> str:
        return f"FunctionalSample(n={self.n}, {self.grid!r})"


def integrate(f: GridFunction) -> float:
    """Trapezoid-rule integral of ``f`` over its grid interval."""
    return float(f.grid.weights @ f.values)


def lp_norm(f: GridFunction, p: float = 2.0) -> float:
    """Lp norm ``(integral |f|^p)^(1/p)`` by trapezoid quadrature.

    Parameters
    ----------
    f : GridFunction
    p : float
        Norm order, ``p >= 1``.
    """
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"norm order must satisfy p >= 1, got {p}")
    av = np.abs(f.values)
    if p == 2.0:
        # dominant case, avoid the general power
        return float(np.sqrt(f.grid.weights @ (f.values * f.values)))
    peak = av.max()
    if peak == 0.0:
        return 0.0
    # factor out the peak so large p does not overflow
    return float(peak * (f.grid.weights @ (av / peak) ** p) ** (1.0 / p))


def l2_inner(f: GridFunction, g: GridFunction) -> float:
    """L2 inner product ``integral f*g`` by trapezoid quadrature."""
    _check_same_grid(f, g)
    return float(f.grid.weights @ (f.values * g.values))


def derivative(f: GridFunction, r: int = 1) -> GridFunction:
    """Finite-difference derivative of order ``r`` (1 or 2).

    Interior points use central differences; the two boundary points use
    second-order one-sided stencils, so the result is second-order accurate
    everywhere. The second derivative uses the direct three-point stencil
    rather than two applications of the first difference.

    Parameters
    ----------
    f : GridFunction
    r : int
        Derivative order, 1 or 2.
    """
    if r not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {r}")
    v = f.values
    m = f.grid.m
    dt = f.grid.dt
    out = np.empty_like(v)
    if r == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dt)
    else:
        if m < 4:
            raise ValueError("second derivative needs at least 4 grid points")
        dt2 = dt * dt
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dt2
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dt2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / dt2
    return GridFunction(f.grid, out)
