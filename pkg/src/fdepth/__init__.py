"""Model-based statistical depth for functional and multivariate data.

The pipeline: fit a covariance eigensystem to a functional sample
(:mod:`fdepth.covkernel`), pick a criterion that measures distance from a
center (:mod:`fdepth.criteria`), then estimate the depth of any function as
the probability that a reference draw is at least as extreme
(:mod:`fdepth.depth`). Elastic alignment utilities live in
:mod:`fdepth.warping`, simulation designs with known ground truth in
:mod:`fdepth.simgen`, and file formats plus the ``fdepth`` command in
:mod:`fdepth.io` / :mod:`fdepth.cli`.
"""

from .core import (
    FunctionalSample,
    Grid,
    GridFunction,
    GridMismatchError,
    derivative,
    integrate,
    l2_inner,
    lp_norm,
)
from .covkernel import (
    CoefficientMatrix,
    DegenerateModelError,
    EigenSystem,
    FittedModel,
    KernelMatrix,
    default_threshold,
    eigen_decompose,
    empirical_covariance,
    fit_model,
    kl_project,
    project_sample,
    truncate,
)
from .criteria import (
    Criterion,
    DivergentWeightsWarning,
    WeightSequence,
    evaluate_criterion,
    mahalanobis_norm_sq,
    modified_norm_sq,
    rkhs_norm_sq,
)
from .depth import (
    DepthResult,
    bootstrap_reference,
    central_region_membership,
    chisq_depth,
    closed_form_contour_level,
    detect_outliers,
    gaussian_reference,
    halfspace_depth_closed_form,
    mc_depth,
    sample_average_depth,
    synthetic_functions,
)
from .special import chi2_cdf, chi2_quantile, std_normal_cdf, std_normal_quantile
from .warping import (
    WarpingFunction,
    fisher_rao_distance,
    karcher_mean,
    optimal_warping,
    srvf,
    warp_l2_distance,
    warping_objective,
)

__version__ = "0.1.0"

__all__ = [
    "FunctionalSample",
    "Grid",
    "GridFunction",
    "GridMismatchError",
    "derivative",
    "integrate",
    "l2_inner",
    "lp_norm",
    "CoefficientMatrix",
    "DegenerateModelError",
    "EigenSystem",
    "FittedModel",
    "KernelMatrix",
    "default_threshold",
    "eigen_decompose",
    "empirical_covariance",
    "fit_model",
    "kl_project",
    "project_sample",
    "truncate",
    "Criterion",
    "DivergentWeightsWarning",
    "WeightSequence",
    "evaluate_criterion",
    "mahalanobis_norm_sq",
    "modified_norm_sq",
    "rkhs_norm_sq",
    "DepthResult",
    "bootstrap_reference",
    "central_region_membership",
    "chisq_depth",
    "closed_form_contour_level",
    "detect_outliers",
    "gaussian_reference",
    "halfspace_depth_closed_form",
    "mc_depth",
    "sample_average_depth",
    "synthetic_functions",
    "chi2_cdf",
    "chi2_quantile",
    "std_normal_cdf",
    "std_normal_quantile",
    "WarpingFunction",
    "fisher_rao_distance",
    "karcher_mean",
    "optimal_warping",
    "srvf",
    "warp_l2_distance",
    "warping_objective",
]
