"""Depth estimators: Monte Carlo, sample-average, and Gaussian closed forms.

A depth assigns every observation a value in [0, 1] that is large near the
center of a distribution and small far out. All estimators here share one
recipe: pick a criterion ``zeta`` (a norm of f - f_c, or a warping
distance), then report the probability that a reference draw is at least as
extreme as the observation,

    D(f_obs) = P(zeta(G, f_c) >= zeta(f_obs, f_c)).

The Monte Carlo estimator replaces the law of G by synthetic draws
reconstructed from resampled (or Gaussian) basis coefficients; the
sample-average estimator uses the raw sample itself; for a Gaussian model
with the RKHS norm the probability is available in closed form through the
normal or chi-square distribution.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import covkernel
from .core import FunctionalSample, GridFunction
from .criteria import Criterion, evaluate_criterion, modified_norm_sq, rkhs_norm_sq
from .rng import substream
from .special import chi2_cdf, chi2_quantile, std_normal_cdf, std_normal_quantile
from .warping import _worker_count

__all__ = [
    "DepthResult",
    "bootstrap_reference",
    "gaussian_reference",
    "synthetic_functions",
    "mc_depth",
    "sample_average_depth",
    "halfspace_depth_closed_form",
    "chisq_depth",
    "central_region_membership",
    "closed_form_contour_level",
    "detect_outliers",
]

_ESTIMATORS = ("monte-carlo", "sample-average", "closed-form")

# criterion kinds whose zeta is a plain function of basis coefficients,
# allowing reference draws to be scored without reconstructing functions
_COEFF_KINDS = ("modified-rkhs", "rkhs")


@dataclass(frozen=True)
class DepthResult:
    """A depth value together with how it was computed.

    ``criterion_value`` is the distance ``zeta(f_obs, f_c)`` the depth was
    derived from (the RKHS norm itself for the closed forms); ``N`` is the
    reference size (0 for closed forms) and ``seed`` the master seed of the
    reference draw (0 when no randomness was involved).
    """

    value: float
    criterion: str
    estimator: str
    N: int
    seed: int
    criterion_value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"depth value {self.value} outside [0, 1]")
        if self.estimator not in _ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}")


def bootstrap_reference(coeffs, N: int, seed: int = 0) -> np.ndarray:
    """N synthetic coefficient rows, resampled per coordinate.

    Each output column p is drawn uniformly with replacement from the
    corresponding column of ``coeffs``, independently of the other columns.
    Replicate j uses the dedicated substream (seed, j), so a given (seed, j)
    pair always yields the same row no matter how many replicates are drawn
    or on how many workers.
    """
    values = coeffs.coeffs if isinstance(coeffs, covkernel.CoefficientMatrix) else np.asarray(coeffs, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0:
        raise ValueError("coefficient matrix must have at least one row")
    if N < 1:
        raise ValueError("N must be >= 1")
    n, C = values.shape
    cols = np.arange(C)
    out = np.empty((N, C))
    for j in range(N):
        idx = substream(seed, j).integers(0, n, size=C)
        out[j] = values[idx, cols]
    return out


def gaussian_reference(system: covkernel.EigenSystem, N: int, seed: int = 0) -> np.ndarray:
    """N coefficient rows drawn as independent N(0, lambda_p) variables.

    The parametric alternative to :func:`bootstrap_reference` for a
    Gaussian-process model: coefficient p has variance equal to the p-th
    eigenvalue. Same per-replicate substream layout.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    scale = np.sqrt(system.eigenvalues[: system.C])
    out = np.empty((N, system.C))
    for j in range(N):
        out[j] = substream(seed, j).standard_normal(system.C) * scale
    return out


def synthetic_functions(
    rows: np.ndarray,
    system: covkernel.EigenSystem,
    f_c: GridFunction | None = None,
) -> FunctionalSample:
    """Functions reconstructed from coefficient rows via the basis expansion.

    Row j becomes ``f_c + sum_p rows[j, p] phi_p``; ``f_c`` defaults to the
    zero function. This is how non-coefficient criteria (Lp, derivative,
    warping) get their Monte Carlo reference.
    """
    rows = np.asarray(rows, dtype=float)
    values = rows @ system.eigenfunctions[: rows.shape[1]]
    if f_c is not None:
        if f_c.grid != system.grid:
            raise covkernel.GridMismatchError("center grid does not match the eigensystem")
        values = values + f_c.values
    return FunctionalSample(system.grid, values)


def _map_values(criterion: Criterion, functions, f_c) -> np.ndarray:
    """zeta(f, f_c) for each function, optionally on FDEPTH_THREADS workers."""
    items = list(functions)
    workers = min(_worker_count(), len(items))
    if workers <= 1:
        return np.array([evaluate_criterion(criterion, f, f_c) for f in items])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(lambda f: evaluate_criterion(criterion, f, f_c), items)))


def _reference_values(criterion: Criterion, reference, f_c) -> np.ndarray:
    """Criterion values of a reference set (coefficient rows or functions)."""
    if isinstance(reference, np.ndarray) and reference.ndim == 2:
        if criterion.kind == "mahalanobis":
            return np.array([evaluate_criterion(criterion, row, f_c) for row in reference])
        if criterion.kind not in _COEFF_KINDS:
            raise ValueError(
                f"coefficient rows cannot be scored under criterion {criterion.tag}; "
                "reconstruct functions with synthetic_functions first"
            )
        if criterion.system is None:
            raise ValueError(f"criterion {criterion.tag} needs an eigensystem")
        if criterion.kind == "modified-rkhs":
            sq = modified_norm_sq(reference, criterion.system, criterion.weights)
        else:
            sq = rkhs_norm_sq(reference, criterion.system)
        return np.sqrt(sq)
    if isinstance(reference, FunctionalSample):
        return _map_values(criterion, reference, f_c)
    if isinstance(reference, (list, tuple)):
        if len(reference) == 0:
            raise ValueError("reference must be nonempty")
        return _map_values(criterion, reference, f_c)
    raise TypeError(f"unsupported reference type {type(reference).__name__}")


def mc_depth(f_obs, f_c, criterion: Criterion, reference, seed: int = 0) -> DepthResult:
    """Monte Carlo depth: fraction of reference draws at least as extreme.

    ``reference`` is either a 2-D array of coefficient rows (for the
    coefficient-based criteria, or data rows for ``mahalanobis``) or a
    collection of functions. Ties count toward the depth: the indicator is
    ``zeta(f_obs) <= zeta(g_j)``, so scoring the center itself gives 1.0.
    ``seed`` is recorded in the result as the seed the reference was drawn
    with; the depth itself is a deterministic function of its inputs.
    """
    zeta_ref = _reference_values(criterion, reference, f_c)
    if zeta_ref.size == 0:
        raise ValueError("reference must be nonempty")
    zeta_obs = evaluate_criterion(criterion, f_obs, f_c)
    value = float(np.mean(zeta_obs <= zeta_ref))
    return DepthResult(value, criterion.tag, "monte-carlo", int(zeta_ref.size), seed, zeta_obs)


def sample_average_depth(f_obs, f_c, criterion: Criterion, sample: FunctionalSample) -> DepthResult:
    """Depth estimated from the raw sample: fraction with zeta_i >= zeta_obs.

    The plug-in estimator that skips the resampling step. It cannot resolve
    depths below 1/n and is noticeably less stable than :func:`mc_depth` at
    small n, but needs no model fit beyond the center.
    """
    zeta_sample = _map_values(criterion, sample, f_c)
    zeta_obs = evaluate_criterion(criterion, f_obs, f_c)
    value = float(np.mean(zeta_sample >= zeta_obs))
    return DepthResult(value, criterion.tag, "sample-average", int(sample.n), 0, zeta_obs)


def _rkhs_norm_of(f_obs: GridFunction, system: covkernel.EigenSystem, f_c) -> float:
    diff = f_obs - f_c if f_c is not None else f_obs
    coeffs = covkernel.kl_project(diff, system)
    return math.sqrt(rkhs_norm_sq(coeffs, system))


def halfspace_depth_closed_form(
    f_obs: GridFunction,
    system: covkernel.EigenSystem,
    f_c: GridFunction | None = None,
) -> DepthResult:
    """Halfspace depth of a Gaussian model: ``1 - Phi(||f_obs||_HK)``.

    The infimum over directions of the probability of the halfspace through
    f_obs, which for a finite-dimensional Gaussian process reduces to the
    normal upper tail of the RKHS norm. Maximal value 0.5, attained only at
    the center.
    """
    norm = _rkhs_norm_of(f_obs, system, f_c)
    value = 1.0 - std_normal_cdf(norm)
    return DepthResult(value, "halfspace", "closed-form", 0, 0, norm)


def chisq_depth(
    f_obs: GridFunction,
    system: covkernel.EigenSystem,
    f_c: GridFunction | None = None,
) -> DepthResult:
    """Survival depth ``1 - F_chi2(C)(||f_obs||^2_HK)`` for a Gaussian model.

    Under the model the squared RKHS norm of a draw is chi-square with
    ``system.C`` degrees of freedom, so this is the probability that a draw
    is farther out than f_obs. ``criterion_value`` stores the norm (not its
    square) for comparability with the halfspace form.
    """
    norm = _rkhs_norm_of(f_obs, system, f_c)
    value = 1.0 - chi2_cdf(norm * norm, system.C)
    return DepthResult(value, "chisq", "closed-form", 0, 0, norm)


def central_region_membership(depth: DepthResult, alpha: float) -> bool:
    """Whether the observation lies in the alpha-th central region."""
    return depth.value >= alpha


def closed_form_contour_level(alpha: float, system: covkernel.EigenSystem, form: str = "halfspace") -> float:
    """RKHS-norm level of the depth-alpha contour of a closed form.

    Solves ``depth = alpha`` for the criterion value: every function whose
    RKHS norm equals the returned level has depth exactly alpha, so the
    contour is a norm sphere. For the halfspace form alpha must lie in
    (0, 0.5]; for the chi-square form in (0, 1).
    """
    if form == "halfspace":
        if not 0.0 < alpha <= 0.5:
            raise ValueError("halfspace depth takes values in (0, 0.5]")
        return std_normal_quantile(1.0 - alpha)
    if form == "chisq":
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        return math.sqrt(chi2_quantile(1.0 - alpha, system.C))
    raise ValueError(f"unknown closed form {form!r}")


def detect_outliers(
    sample: FunctionalSample,
    criterion: Criterion,
    estimator: str = "monte-carlo",
    alpha: float = 0.05,
    N: int = 1000,
    seed: int = 0,
    delta: float | None = None,
    reference: str = "bootstrap",
) -> tuple[list[int], list[DepthResult]]:
    """Indices of sample functions whose depth falls below ``alpha``.

    Fits the covariance model on the full sample (no leave-one-out), scores
    every observation against one shared reference, and flags those with
    depth < alpha. The center is the cross-sectional mean, except for
    warping criteria where the elastic template is used. ``reference``
    selects the Monte Carlo sampler: "bootstrap" resamples observed
    coefficients, "gaussian" draws them from N(0, lambda_p).

    Returns
    -------
    (indices, results)
        Flagged indices in increasing order, and the full list of
        per-observation depth results for reporting.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if estimator not in ("monte-carlo", "sample-average"):
        raise ValueError("estimator must be 'monte-carlo' or 'sample-average'")
    if criterion.kind == "mahalanobis":
        raise ValueError(
            "mahalanobis applies to multivariate rows, not functional samples; "
            "score rows with mc_depth directly"
        )
    if reference not in ("bootstrap", "gaussian"):
        raise ValueError("reference must be 'bootstrap' or 'gaussian'")

    model = covkernel.fit_model(sample, delta=delta)
    if criterion.kind in _COEFF_KINDS and criterion.system is None:
        criterion = criterion.with_context(system=model.system)

    if criterion.kind in ("warp-l2", "warp-fisher-rao"):
        from .warping import karcher_mean

        f_c, _ = karcher_mean(sample)
    else:
        f_c = model.mean

    if estimator == "monte-carlo":
        if reference == "bootstrap":
            rows = bootstrap_reference(model.coeffs, N, seed)
        else:
            rows = gaussian_reference(model.system, N, seed)
        if criterion.kind in _COEFF_KINDS:
            ref = rows
        else:
            ref = synthetic_functions(rows, model.system, f_c=model.mean)
        zeta_ref = _reference_values(criterion, ref, f_c)
        ref_size, ref_seed = N, seed
    else:
        zeta_ref = _map_values(criterion, sample, f_c)
        ref_size, ref_seed = sample.n, 0

    zeta_obs = _map_values(criterion, sample, f_c)
    results = []
    for z in zeta_obs:
        value = float(np.mean(z <= zeta_ref))
        results.append(DepthResult(value, criterion.tag, estimator, ref_size, ref_seed, float(z)))
    flagged = [i for i, r in enumerate(results) if r.value < alpha]
    return flagged, results
