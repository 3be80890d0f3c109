"""Synthetic data generators with known ground truth.

Five families cover the standard test situations for functional depth:

- Gaussian processes with Matern covariance (smooth vs rough paths),
- Brownian-bridge expansions with heavy-tailed Laplace coefficients,
- finite Fourier expansions with Gaussian coefficients, including an
  inlier/outlier magnitude mixture,
- amplitude/phase data: two-bump curves composed with monotone warpings,
- plain multivariate normals for the finite-dimensional sanity checks.

Every generator is a pure function of its arguments: path i draws from the
substream (seed, i), so samples are bit-identical across runs and across
worker counts, and growing n extends a sample without changing the earlier
paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jacobi import jacobi_eigh
from .core import FunctionalSample, Grid, GridFunction
from .covkernel import EigenSystem, KernelMatrix, eigen_decompose
from .rng import substream
from .special import chi2_cdf, std_normal_cdf

__all__ = [
    "GeneratorSpec",
    "generate",
    "matern_kernel",
    "matern_kernel_matrix",
    "gp_sample",
    "brownian_bridge_system",
    "brownian_bridge_laplace_sample",
    "fourier_basis",
    "fourier_gp_sample",
    "fourier_outlier_sample",
    "two_bump_warped_sample",
    "mvn_sample",
    "std_normal_cdf",
    "chi2_cdf",
]

_GENERATOR_KINDS = (
    "matern-gp",
    "brownian-bridge-laplace",
    "fourier-gp",
    "two-bump-warped",
    "mvn",
)

_COEFF_LAWS = ("std-normal", "decaying-normal", "normal")


@dataclass(frozen=True)
class GeneratorSpec:
    """A fully determined simulation design: kind, parameters, grid, seed."""

    kind: str
    grid: Grid | None
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "matern-gp":
            nu = self.params.get("nu", 0.5)
            if nu not in (0.5, 1.5):
                raise ValueError("only nu in {1/2, 3/2} has a closed-form kernel")
            if self.params.get("l", 1.0) <= 0:
                raise ValueError("length scale must be positive")
        if self.kind == "fourier-gp":
            law = self.params.get("coeff_law", "std-normal")
            if law not in _COEFF_LAWS:
                raise ValueError(f"unknown coefficient law {law!r}")


def generate(spec: GeneratorSpec):
    """Run a generator spec; returns a FunctionalSample (or rows for mvn)."""
    p = spec.params
    if spec.kind == "matern-gp":
        kernel = matern_kernel_matrix(p.get("nu", 0.5), p.get("l", 1.0), spec.grid)
        return gp_sample(kernel, p["n"], spec.seed)
    if spec.kind == "brownian-bridge-laplace":
        sample, _ = brownian_bridge_laplace_sample(
            p["n"], p.get("P_trunc", 1000), spec.seed, grid=spec.grid
        )
        return sample
    if spec.kind == "fourier-gp":
        return fourier_gp_sample(
            p["P"],
            p.get("coeff_law", "std-normal"),
            p["n"],
            spec.seed,
            grid=spec.grid,
            variance=p.get("variance", 1.0),
        )
    if spec.kind == "two-bump-warped":
        return two_bump_warped_sample(
            p.get("n", 21), spec.seed, grid=spec.grid, noise=p.get("noise", True)
        )
    return mvn_sample(p["mu"], p["sigma"], p["n"], spec.seed)


def matern_kernel(nu: float, l: float, s, t):
    """Matern covariance with closed-form half-integer smoothness.

    nu=1/2 gives ``exp(-|s-t|/l)`` (Ornstein-Uhlenbeck, rough paths);
    nu=3/2 gives ``(1 + sqrt(3)|s-t|/l) exp(-sqrt(3)|s-t|/l)`` (once
    differentiable paths). Broadcasts over array arguments.
    """
    if l <= 0:
        raise ValueError("length scale must be positive")
    d = np.abs(np.asarray(s, dtype=float) - np.asarray(t, dtype=float)) / l
    if nu == 0.5:
        out = np.exp(-d)
    elif nu == 1.5:
        out = (1.0 + math.sqrt(3.0) * d) * np.exp(-math.sqrt(3.0) * d)
    else:
        raise ValueError("only nu in {1/2, 3/2} is supported")
    return float(out) if out.ndim == 0 else out


def matern_kernel_matrix(nu: float, l: float, grid: Grid) -> KernelMatrix:
    """The Matern kernel evaluated on all grid point pairs."""
    s = grid.points[:, None]
    return KernelMatrix(grid, matern_kernel(nu, l, s, s.T))


def gp_sample(kernel, n: int, seed: int = 0, stream_offset: int = 0) -> FunctionalSample:
    """n zero-mean Gaussian process paths from a kernel or eigensystem.

    The kernel is eigendecomposed on the grid and path i is assembled as
    ``sum_p xi_p phi_p`` with independent ``xi_p ~ N(0, lambda_p)`` drawn
    from substream (seed, stream_offset + i). The offset lets several
    samples under one master seed use disjoint streams (e.g. a mixture of
    two kernels).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    system = kernel if isinstance(kernel, EigenSystem) else eigen_decompose(kernel)
    scale = np.sqrt(system.eigenvalues)
    values = np.empty((n, system.grid.m))
    for i in range(n):
        xi = substream(seed, stream_offset + i).standard_normal(system.C) * scale
        values[i] = xi @ system.eigenfunctions
    return FunctionalSample(system.grid, values)


def brownian_bridge_system(P: int, grid: Grid | None = None) -> EigenSystem:
    """The analytic Brownian-bridge eigensystem, truncated at P terms.

    ``K(s,t) = min(s,t) - st`` on [0,1] has ``lambda_p = 1/(p pi)^2`` and
    ``phi_p(t) = sqrt(2) sin(p pi t)``; this returns those evaluated on the
    grid, for use as an exact oracle against fitted systems.
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    if grid is None:
        grid = Grid(0.0, 1.0, 201)
    p = np.arange(1, P + 1)
    lam = 1.0 / (p * np.pi) ** 2
    phi = math.sqrt(2.0) * np.sin(np.pi * np.outer(p, grid.points))
    # sin(p*pi*t) vanishes identically at t=0 and t=1; zero out the
    # roundoff left by evaluating sin at multiples of pi
    if grid.t0 == 0.0:
        phi[:, 0] = 0.0
    if grid.t1 == 1.0:
        phi[:, -1] = 0.0
    return EigenSystem(grid, lam, phi, delta=0.0, raw_count=P)


def brownian_bridge_laplace_sample(
    n: int,
    P_trunc: int = 1000,
    seed: int = 0,
    grid: Grid | None = None,
) -> tuple[FunctionalSample, EigenSystem]:
    """Brownian-bridge expansion with Laplace coefficients, plus the truth.

    Coefficient p of path i is Laplace with mean 0 and variance
    ``lambda_p`` (scale ``sqrt(lambda_p / 2)``), drawn by inverse CDF from
    substream (seed, i). A non-Gaussian process whose covariance is still
    exactly the truncated Brownian bridge, so the analytic eigensystem
    remains the oracle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    system = brownian_bridge_system(P_trunc, grid)
    scale = np.sqrt(system.eigenvalues / 2.0)
    values = np.empty((n, system.grid.m))
    for i in range(n):
        u = substream(seed, i).uniform(-0.5, 0.5, size=P_trunc)
        coeffs = -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
        values[i] = coeffs @ system.eigenfunctions
    return FunctionalSample(system.grid, values), system


def fourier_basis(P: int, family: str, grid: Grid) -> np.ndarray:
    """P orthonormal Fourier-type basis rows on the grid.

    family="interleaved": ``sqrt(2) sin(pi (p+1) t)`` for odd p and
    ``sqrt(2) cos(pi p t)`` for even p, pairing sines and cosines of equal
    frequency. family="constant-leading": 1 first, then
    ``sqrt(2) cos(pi p t)`` for even p and ``sqrt(2) sin(pi (p-1) t)`` for
    odd p >= 3. Both are orthonormal on [0, 1].
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    t = grid.points
    rows = np.empty((P, grid.m))
    for idx in range(P):
        p = idx + 1
        if family == "interleaved":
            if p % 2 == 1:
                rows[idx] = math.sqrt(2.0) * np.sin(np.pi * (p + 1) * t)
            else:
                rows[idx] = math.sqrt(2.0) * np.cos(np.pi * p * t)
        elif family == "constant-leading":
            if p == 1:
                rows[idx] = 1.0
            elif p % 2 == 0:
                rows[idx] = math.sqrt(2.0) * np.cos(np.pi * p * t)
            else:
                rows[idx] = math.sqrt(2.0) * np.sin(np.pi * (p - 1) * t)
        else:
            raise ValueError(f"unknown basis family {family!r}")
    return rows


def fourier_gp_sample(
    P: int,
    coeff_law: str,
    n: int,
    seed: int = 0,
    grid: Grid | None = None,
    variance: float = 1.0,
    family: str | None = None,
) -> FunctionalSample:
    """n finite Fourier expansions with independent Gaussian coefficients.

    Coefficient laws: "std-normal" is N(0,1); "normal" is N(0, variance);
    "decaying-normal" is N(0, ((P-p+1)/P)^2), a spectrum that falls to
    (1/P)^2 by the last component. The basis family defaults to
    "constant-leading" for the decaying law and "interleaved" otherwise.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if coeff_law not in _COEFF_LAWS:
        raise ValueError(f"unknown coefficient law {coeff_law!r}")
    if grid is None:
        grid = Grid(0.0, 1.0, 201)
    if family is None:
        family = "constant-leading" if coeff_law == "decaying-normal" else "interleaved"
    phi = fourier_basis(P, family, grid)
    if coeff_law == "decaying-normal":
        sd = (P - np.arange(P)) / P
    elif coeff_law == "normal":
        sd = np.full(P, math.sqrt(variance))
    else:
        sd = np.ones(P)
    values = np.empty((n, grid.m))
    for i in range(n):
        values[i] = (substream(seed, i).standard_normal(P) * sd) @ phi
    return FunctionalSample(grid, values)


def fourier_outlier_sample(
    P: int,
    seed: int = 0,
    n_inliers: int = 45,
    n_outliers: int = 5,
    grid: Grid | None = None,
    outlier_variance: float = 3.0,
) -> tuple[FunctionalSample, list[int]]:
    """The 45 + 5 magnitude-outlier mixture on the interleaved basis.

    Inlier coefficients are N(0,1), outlier coefficients N(0, 3): same
    basis, same center, inflated spread in every direction. Outliers occupy
    the trailing indices; they are returned explicitly so detection tests
    do not depend on that convention.
    """
    grid = grid if grid is not None else Grid(0.0, 1.0, 201)
    phi = fourier_basis(P, "interleaved", grid)
    n = n_inliers + n_outliers
    values = np.empty((n, grid.m))
    sd_out = math.sqrt(outlier_variance)
    for i in range(n):
        coeffs = substream(seed, i).standard_normal(P)
        if i >= n_inliers:
            coeffs = coeffs * sd_out
        values[i] = coeffs @ phi
    return FunctionalSample(grid, values), list(range(n_inliers, n))


def two_bump_warped_sample(
    n: int = 21,
    seed: int = 0,
    grid: Grid | None = None,
    noise: bool = True,
) -> FunctionalSample:
    """Amplitude/phase sample: two Gaussian bumps under exponential warps.

    ``h_i(t) = z_i1 exp(-(t-1.5)^2/2) + z_i2 exp(-(t+1.5)^2/2)`` with
    ``z_ij ~ N(1, 1/16)``, composed with
    ``gamma_i(t) = 6 (e^{a_i (t+3)/6} - 1)/(e^{a_i} - 1) - 3`` where the
    ``a_i`` are equally spaced on [-1, 1] (the middle one is 0, giving the
    identity warp). With ``noise=True`` the middle function also carries
    additive white noise of variance 0.01 per grid point, making it the
    one curve whose warping functions turn jagged.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and >= 3 so a middle function exists")
    if grid is None:
        grid = Grid(-3.0, 3.0, 201)
    t = grid.points
    a_vals = np.linspace(-1.0, 1.0, n)
    values = np.empty((n, grid.m))
    for i in range(n):
        rng = substream(seed, i)
        z1, z2 = 1.0 + 0.25 * rng.standard_normal(2)
        a = a_vals[i]
        if a == 0.0:
            gam = t
        else:
            gam = 6.0 * np.expm1(a * (t + 3.0) / 6.0) / np.expm1(a) - 3.0
        values[i] = z1 * np.exp(-((gam - 1.5) ** 2) / 2.0) + z2 * np.exp(
            -((gam + 1.5) ** 2) / 2.0
        )
    if noise:
        mid = (n - 1) // 2
        values[mid] += 0.1 * substream(seed, n).standard_normal(grid.m)
    return FunctionalSample(grid, values)


def mvn_sample(mu, sigma, n: int, seed: int = 0) -> np.ndarray:
    """n multivariate normal rows via the symmetric square root of sigma."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d = mu.size
    if sigma.shape != (d, d):
        raise ValueError("mu and sigma dimensions do not match")
    if np.abs(sigma - sigma.T).max() > 1e-12 * max(np.abs(sigma).max(), 1.0):
        raise ValueError("sigma must be symmetric")
    lam, Q = jacobi_eigh(sigma)
    if lam[-1] <= 0.0:
        raise ValueError("sigma must be positive definite")
    root = Q * np.sqrt(lam)
    out = np.empty((n, d))
    for i in range(n):
        out[i] = mu + root @ substream(seed, i).standard_normal(d)
    return out
