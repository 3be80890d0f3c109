"""Covariance kernel estimation, eigenanalysis, and coefficient projection.

The fitting pipeline turns a functional sample into an orthonormal
eigensystem of the covariance operator plus per-observation coefficients:

1. sample mean and empirical covariance kernel,
2. eigendecomposition of the discretized integral operator,
3. truncation of the spectrum at a threshold ``delta`` (capped at the
   sample size),
4. projection of each observation onto the retained eigenfunctions.

The integral operator is discretized with the grid's trapezoid weights:
eigenpairs of ``W^(1/2) K W^(1/2)`` (symmetric), with eigenvectors rescaled
by ``W^(-1/2)`` so that eigenfunctions are orthonormal in the same trapezoid
inner product used everywhere else. Eigenvalues then approximate the
operator's spectrum independently of grid resolution.
"""

from __future__ import annotations

import math

import numpy as np

from ._jacobi import JacobiConvergenceError, jacobi_eigh
from .core import FunctionalSample, Grid, GridFunction, GridMismatchError

__all__ = [
    "KernelMatrix",
    "EigenSystem",
    "CoefficientMatrix",
    "FittedModel",
    "DegenerateModelError",
    "JacobiConvergenceError",
    "empirical_covariance",
    "eigen_decompose",
    "default_threshold",
    "truncate",
    "kl_project",
    "project_sample",
    "fit_model",
]

# Relative symmetry tolerance for kernel matrices.
SYMMETRY_RTOL = 1e-12
# A kernel is declared non-PSD when an eigenvalue drops below -1e-8 * largest.
PSD_RTOL = 1e-8
# Relative cutoff below which Gram-route eigenpairs count as numerically null.
_RANK_RTOL = 1e-12


class DegenerateModelError(RuntimeError):
    """No usable spectrum: every eigenvalue fell below the threshold."""


class KernelMatrix:
    """A symmetric covariance kernel evaluated on a grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != (grid.m, grid.m):
            raise ValueError(f"expected shape ({grid.m}, {grid.m}), got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel values must be finite")
        scale = np.abs(vals).max()
        if scale > 0 and np.abs(vals - vals.T).max() > SYMMETRY_RTOL * scale:
            raise ValueError("kernel matrix is not symmetric")
        self.grid = grid
        self.values = vals

    def diagonal_integral(self) -> float:
        """Trapezoid integral of K(t, t), the operator trace."""
        return float(self.grid.weights @ np.diag(self.values))

    def __repr__(self) -> str:
        return f"KernelMatrix({self.grid!r})"


class EigenSystem:
    """Descending eigenvalues with trapezoid-orthonormal eigenfunctions.

    Attributes
    ----------
    eigenvalues : ndarray of shape (C,)
        Nonincreasing, nonnegative.
    eigenfunctions : ndarray of shape (C, m)
        Row ``p`` holds eigenfunction ``p`` on the grid, normalized so that
        its trapezoid L2 norm is 1 and its first nonzero value is positive.
    delta : float
        Truncation threshold applied (0.0 for an untruncated system).
    raw_count : int
        Number of eigenpairs produced by the decomposition before truncation.
    """

    __slots__ = ("grid", "eigenvalues", "eigenfunctions", "delta", "raw_count")

    def __init__(self, grid: Grid, eigenvalues, eigenfunctions, delta, raw_count):
        lam = np.asarray(eigenvalues, dtype=float)
        phi = np.asarray(eigenfunctions, dtype=float)
        if lam.ndim != 1 or phi.shape != (lam.size, grid.m):
            raise ValueError("eigenvalue/eigenfunction shapes are inconsistent")
        if lam.size == 0:
            raise ValueError("eigensystem must retain at least one component")
        if np.any(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be nonincreasing")
        if lam[-1] < 0:
            raise ValueError("eigenvalues must be nonnegative")
        self.grid = grid
        self.eigenvalues = lam
        self.eigenfunctions = phi
        self.delta = float(delta)
        self.raw_count = int(raw_count)

    @property
    def C(self) -> int:
        """Retained component count."""
        return self.eigenvalues.size

    def eigenfunction(self, p: int) -> GridFunction:
        """Eigenfunction ``p`` (0-based) as a :class:`GridFunction`."""
        return GridFunction(self.grid, self.eigenfunctions[p])

    def __repr__(self) -> str:
        return f"EigenSystem(C={self.C}, raw_count={self.raw_count}, delta={self.delta})"


class CoefficientMatrix:
    """Projection coefficients of a sample onto an eigensystem, one row each."""

    __slots__ = ("coeffs", "system")

    def __init__(self, coeffs, system: EigenSystem):
        vals = np.asarray(coeffs, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != system.C:
            raise ValueError(f"expected shape (n, {system.C}), got {vals.shape}")
        self.coeffs = vals
        self.system = system

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def __repr__(self) -> str:
        return f"CoefficientMatrix(n={self.n}, C={self.system.C})"


def empirical_covariance(sample: FunctionalSample, center: bool = True) -> KernelMatrix:
    """Empirical covariance kernel of a sample (1/n normalization).

    With ``center=True`` the pointwise sample mean is subtracted first; with
    ``center=False`` the raw second moment is used, for models declared
    zero-mean.
    """
    if sample.n < 2:
        raise ValueError("need at least 2 functions to estimate a covariance")
    X = sample.values
    if center:
        X = X - X.mean(axis=0)
    K = (X.T @ X) / sample.n
    K = 0.5 * (K + K.T)
    return KernelMatrix(sample.grid, K)


def _orient_rows(phi: np.ndarray) -> np.ndarray:
    """Flip eigenfunction signs so the first nonzero value is positive."""
    for row in phi:
        scale = np.abs(row).max()
        if scale == 0.0:
            continue
        nz = np.nonzero(np.abs(row) > 1e-12 * scale)[0]
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return phi


def eigen_decompose(kernel: KernelMatrix) -> EigenSystem:
    """Eigensystem of the integral operator associated with a kernel.

    Solves the trapezoid-discretized operator by cyclic Jacobi on the
    symmetrized matrix, clips negative eigenvalues at zero, and rescales
    eigenvectors into trapezoid-orthonormal eigenfunctions. The returned
    system is untruncated (``delta`` 0, all ``m`` eigenpairs).

    Raises
    ------
    ValueError
        If the kernel fails the positive-semidefiniteness tolerance.
    JacobiConvergenceError
        If the sweep cap is reached (pathological input).
    """
    grid = kernel.grid
    sw = np.sqrt(grid.weights)
    sym = (sw[:, None] * kernel.values) * sw[None, :]
    lam, vecs = jacobi_eigh(sym)
    if lam[-1] < -PSD_RTOL * max(lam[0], 0.0):
        raise ValueError(
            f"kernel is not positive semi-definite (eigenvalue {lam[-1]:.3e})"
        )
    lam = np.clip(lam, 0.0, None)
    phi = _orient_rows(vecs.T / sw[None, :])
    return EigenSystem(grid, lam, phi, delta=0.0, raw_count=lam.size)


def default_threshold(lambda_1: float, n: int) -> float:
    """Scale-relative truncation threshold max(1e-8, lambda_1 / (sqrt(n) log n))."""
    if n < 2:
        raise ValueError("need n >= 2 for the default threshold")
    return max(1e-8, float(lambda_1) / (math.sqrt(n) * math.log(n)))


def truncate(system: EigenSystem, delta: float, n: int) -> EigenSystem:
    """Retain the leading eigenpairs with eigenvalue >= delta, at most n.

    Raises
    ------
    DegenerateModelError
        If no eigenvalue reaches the threshold.
    """
    delta = float(delta)
    if delta <= 0:
        raise ValueError(f"threshold must be positive, got {delta}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    count = int(np.sum(system.eigenvalues >= delta))
    if count == 0:
        raise DegenerateModelError(
            f"no eigenvalue reaches the threshold {delta:.3e}; model is degenerate"
        )
    C = min(count, int(n))
    return EigenSystem(
        system.grid,
        system.eigenvalues[:C],
        system.eigenfunctions[:C],
        delta=delta,
        raw_count=system.raw_count,
    )


def kl_project(f: GridFunction, system: EigenSystem) -> np.ndarray:
    """Coefficients ``<f, phi_p>`` of a function in the eigenbasis."""
    if f.grid != system.grid:
        raise GridMismatchError("function and eigensystem grids differ")
    return (system.eigenfunctions * system.grid.weights) @ f.values


def project_sample(sample: FunctionalSample, system: EigenSystem) -> CoefficientMatrix:
    """Row-wise :func:`kl_project` of a whole sample."""
    if sample.grid != system.grid:
        raise GridMismatchError("sample and eigensystem grids differ")
    coeffs = sample.values @ (system.eigenfunctions * system.grid.weights).T
    return CoefficientMatrix(coeffs, system)


class FittedModel:
    """Everything the depth estimators need from a fitted sample.

    Attributes
    ----------
    mean : GridFunction
        Fitted center (pointwise sample mean; the zero function when the
        model was fitted with ``center=False``).
    system : EigenSystem
        Truncated eigensystem.
    coeffs : CoefficientMatrix
        Projections of the centered sample onto the retained eigenfunctions.
    delta : float
        Threshold actually applied.
    n : int
        Fitting sample size.
    centered : bool
        Whether the mean was estimated and subtracted.
    ids : list of str or None
        Identifiers of the fitting sample rows, when known.
    """

    __slots__ = ("mean", "system", "coeffs", "delta", "n", "centered", "ids")

    def __init__(self, mean, system, coeffs, delta, n, centered, ids=None):
        self.mean = mean
        self.system = system
        self.coeffs = coeffs
        self.delta = float(delta)
        self.n = int(n)
        self.centered = bool(centered)
        self.ids = list(ids) if ids is not None else None

    @property
    def grid(self) -> Grid:
        return self.system.grid

    def __repr__(self) -> str:
        return f"FittedModel(n={self.n}, C={self.system.C}, delta={self.delta:.3e})"


def _gram_eigensystem(centered: np.ndarray, grid: Grid) -> EigenSystem:
    """Eigensystem of the empirical covariance operator via the n x n Gram.

    For n < m the covariance operator has rank at most n, and its nonzero
    eigenpairs coincide with those of the Gram matrix of the weighted data
    rows. This keeps the Jacobi solver on an n x n problem. Pairs in the
    numerical null space (below ``_RANK_RTOL`` relative) carry no usable
    eigenfunction and are dropped; ``raw_count`` still reports n.
    """
    n = centered.shape[0]
    B = centered * np.sqrt(grid.weights)[None, :]
    gram = (B @ B.T) / n
    gram = 0.5 * (gram + gram.T)
    lam, U = jacobi_eigh(gram)
    lam = np.clip(lam, 0.0, None)
    keep = lam > _RANK_RTOL * max(lam[0], 1e-300)
    if not np.any(keep):
        # zero sample: fall back to a single zero component so truncation
        # can report the degenerate model with its usual error
        lam_keep = lam[:1]
        phi = np.zeros((1, grid.m))
    else:
        lam_keep = lam[keep]
        Y = (B.T @ U[:, keep]) / np.sqrt(n * lam_keep)[None, :]
        phi = _orient_rows(Y.T / np.sqrt(grid.weights)[None, :])
    return EigenSystem(grid, lam_keep, phi, delta=0.0, raw_count=n)


def fit_model(
    sample: FunctionalSample,
    delta: float | None = None,
    center: bool = True,
) -> FittedModel:
    """Fit mean, truncated eigensystem, and coefficients to a sample.

    Parameters
    ----------
    sample : FunctionalSample
    delta : float, optional
        Truncation threshold; default is ``max(1e-8, lambda_1/(sqrt(n) log n))``.
    center : bool
        Estimate and subtract the sample mean (default). Pass ``False`` for
        models declared zero-mean.

    Notes
    -----
    When the sample is smaller than the grid (n < m) the eigenproblem is
    solved in sample space (Gram matrix), which yields the same retained
    eigenpairs as decomposing the full kernel matrix.
    """
    n = sample.n
    if n < 2:
        raise ValueError("need at least 2 functions to fit a model")
    grid = sample.grid
    if center:
        mean_vals = sample.values.mean(axis=0)
    else:
        mean_vals = np.zeros(grid.m)
    mean = GridFunction(grid, mean_vals)
    centered = sample.values - mean_vals

    if n < grid.m:
        system = _gram_eigensystem(centered, grid)
    else:
        system = eigen_decompose(empirical_covariance(sample, center=center))

    if delta is None:
        delta = default_threshold(system.eigenvalues[0], n)
    system = truncate(system, delta, n)
    coeffs = CoefficientMatrix(
        centered @ (system.eigenfunctions * grid.weights).T, system
    )
    return FittedModel(mean, system, coeffs, delta=delta, n=n, centered=center, ids=sample.ids)
