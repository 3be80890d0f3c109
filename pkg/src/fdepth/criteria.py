"""Criterion functions: the distances that order functions center-outward.

A criterion ``zeta(f, f_c)`` measures how far an observation sits from a
center function. Available kinds:

- ``lp(p)`` and ``derivative-lp(r, p)``: Lp norms of ``f - f_c`` or of its
  r-th derivative,
- ``modified-rkhs``: the weighted norm ``sum_p coeff_p^2 / lambda_p * a_p^2``
  over eigensystem coefficients, with a square-summable weight sequence
  ``a_p`` so the population norm has finite expectation,
- ``rkhs``: the unweighted kernel norm (finite-dimensional models only, it
  diverges almost surely under infinite-dimensional ones),
- ``warp-l2`` and ``warp-fisher-rao``: distances of the optimal warping to
  the identity, for phase-based depth,
- ``mahalanobis``: the covariance-standardized Euclidean norm for
  multivariate data.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np

from . import covkernel
from ._jacobi import jacobi_eigh
from .core import GridFunction, derivative, lp_norm

__all__ = [
    "WeightSequence",
    "Criterion",
    "DivergentWeightsWarning",
    "modified_norm_sq",
    "rkhs_norm_sq",
    "mahalanobis_norm_sq",
    "evaluate_criterion",
]

# Condition-number guard for the Mahalanobis covariance.
_COND_LIMIT = 1e12

WEIGHT_KINDS = ("constant-one", "inverse-p", "inverse-sqrt-log", "power")


class DivergentWeightsWarning(UserWarning):
    """Constant-one weights give a norm that diverges for infinite-dimensional
    processes; they are only meaningful with finite-dimensional models."""


@dataclasses.dataclass(frozen=True)
class WeightSequence:
    """A weight sequence ``a_p``, evaluated lazily to any length.

    Kinds: ``constant-one`` (a_p = 1, not square-summable), ``inverse-p``
    (a_p = 1/p), ``inverse-sqrt-log`` (a_p = 1/(sqrt(p) log(p+1))) and
    ``power`` (a_p = p^-(0.5+s), s > 0).
    """

    kind: str
    s: float | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "power":
            if self.s is None or not self.s > 0:
                raise ValueError("power weights need s > 0")
        elif self.s is not None:
            raise ValueError(f"weight kind {self.kind!r} takes no parameter")

    @classmethod
    def constant_one(cls) -> "WeightSequence":
        return cls("constant-one")

    @classmethod
    def inverse_p(cls) -> "WeightSequence":
        return cls("inverse-p")

    @classmethod
    def inverse_sqrt_log(cls) -> "WeightSequence":
        return cls("inverse-sqrt-log")

    @classmethod
    def power(cls, s: float) -> "WeightSequence":
        return cls("power", float(s))

    @property
    def square_summable(self) -> bool:
        return self.kind != "constant-one"

    @property
    def name(self) -> str:
        if self.kind == "power":
            return f"power({self.s:g})"
        return self.kind

    def values(self, length: int) -> np.ndarray:
        """The first ``length`` weights a_1 .. a_length."""
        if length < 1:
            raise ValueError("length must be positive")
        p = np.arange(1, length + 1, dtype=float)
        if self.kind == "constant-one":
            return np.ones(length)
        if self.kind == "inverse-p":
            return 1.0 / p
        if self.kind == "inverse-sqrt-log":
            return 1.0 / (np.sqrt(p) * np.log(p + 1.0))
        return p ** -(0.5 + self.s)

    def diagnostic(self) -> "WeightSequence":
        """The dominating sequence b_p with a_p <= b_p p^-alpha.

        Defined for the power family (and inverse-p, which is power(0.5)):
        power(s) has b_p = p^-(0.5+s/2).
        """
        if self.kind == "power":
            return WeightSequence.power(self.s / 2.0)
        if self.kind == "inverse-p":
            return WeightSequence.power(0.25)
        raise ValueError(f"no diagnostic sequence defined for {self.kind!r}")


_CRITERION_KINDS = (
    "lp",
    "derivative-lp",
    "modified-rkhs",
    "rkhs",
    "warp-l2",
    "warp-fisher-rao",
    "mahalanobis",
)


@dataclasses.dataclass(frozen=True, eq=False)
class Criterion:
    """A tagged criterion with whatever context its kind needs.

    Build instances through the factory classmethods. RKHS kinds need an
    :class:`~fdepth.covkernel.EigenSystem` (bound at construction or later
    with :meth:`with_context`); mahalanobis needs a covariance matrix.
    """

    kind: str
    p: float = 2.0
    r: int = 1
    weights: WeightSequence | None = None
    system: "covkernel.EigenSystem | None" = None
    mean: np.ndarray | None = None
    cov: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _CRITERION_KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r}")
        if self.kind == "modified-rkhs":
            if self.weights is None:
                object.__setattr__(self, "weights", WeightSequence.inverse_p())
            if not self.weights.square_summable:
                warnings.warn(
                    "constant-one weights diverge for infinite-dimensional "
                    "processes; use them only with finite-dimensional models",
                    DivergentWeightsWarning,
                    stacklevel=2,
                )

    @classmethod
    def lp(cls, p: float = 2.0) -> "Criterion":
        if not float(p) >= 1.0:
            raise ValueError(f"need p >= 1, got {p}")
        return cls("lp", p=float(p))

    @classmethod
    def derivative_lp(cls, r: int = 1, p: float = 2.0) -> "Criterion":
        if r not in (1, 2):
            raise ValueError(f"derivative order must be 1 or 2, got {r}")
        if not float(p) >= 1.0:
            raise ValueError(f"need p >= 1, got {p}")
        return cls("derivative-lp", p=float(p), r=int(r))

    @classmethod
    def modified_rkhs(cls, weights=None, system=None) -> "Criterion":
        return cls("modified-rkhs", weights=weights, system=system)

    @classmethod
    def rkhs(cls, system=None) -> "Criterion":
        return cls("rkhs", system=system)

    @classmethod
    def warp_l2(cls) -> "Criterion":
        return cls("warp-l2")

    @classmethod
    def warp_fisher_rao(cls) -> "Criterion":
        return cls("warp-fisher-rao")

    @classmethod
    def mahalanobis(cls, cov, mean=None) -> "Criterion":
        cov = np.asarray(cov, dtype=float)
        if mean is not None:
            mean = np.asarray(mean, dtype=float)
        return cls("mahalanobis", cov=cov, mean=mean)

    def with_context(self, **kwargs) -> "Criterion":
        """Copy of this criterion with context fields replaced."""
        return dataclasses.replace(self, **kwargs)

    @property
    def tag(self) -> str:
        """Readable tag such as ``lp(2)`` or ``modified-rkhs(inverse-p)``."""
        if self.kind == "lp":
            return f"lp({self.p:g})"
        if self.kind == "derivative-lp":
            return f"derivative-lp({self.r},{self.p:g})"
        if self.kind == "modified-rkhs":
            return f"modified-rkhs({self.weights.name})"
        return self.kind

    def __repr__(self) -> str:
        return f"Criterion({self.tag})"


def _coeff_terms(coeffs, system) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != system.C:
        raise ValueError(
            f"expected {system.C} coefficients, got {coeffs.shape[-1]}"
        )
    lam = system.eigenvalues
    if lam[-1] <= 0.0:
        raise ValueError(
            "system contains a zero eigenvalue; truncate before taking norms"
        )
    return coeffs * coeffs / lam


def modified_norm_sq(coeffs, system, weights: WeightSequence):
    """Squared weighted kernel norm ``sum_p coeffs_p^2 / lambda_p * a_p^2``.

    ``coeffs`` may be a single coefficient vector of length C or a matrix of
    rows; the result is a scalar or a vector accordingly.
    """
    a = weights.values(system.C)
    out = _coeff_terms(coeffs, system) @ (a * a)
    return float(out) if np.ndim(out) == 0 else out


def rkhs_norm_sq(coeffs, system):
    """Squared kernel norm ``sum_p coeffs_p^2 / lambda_p`` (finite-dimensional).

    Accepts a coefficient vector or a matrix of rows, like
    :func:`modified_norm_sq`.
    """
    out = _coeff_terms(coeffs, system).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def mahalanobis_norm_sq(x, mean, cov) -> float:
    """Squared Mahalanobis norm ``(x - mean)^T cov^-1 (x - mean)``.

    Computed through the spectral factorization of ``cov`` (no explicit
    inverse), with a condition-number guard at 1e12.
    """
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    d = x.size
    if mean.size != d or cov.shape != (d, d):
        raise ValueError("dimension mismatch between x, mean, and cov")
    lam, Q = jacobi_eigh(cov)
    if lam[-1] <= 0.0 or lam[0] / lam[-1] > _COND_LIMIT:
        raise ValueError(
            "covariance matrix is singular or too ill-conditioned "
            f"(eigenvalue range [{lam[-1]:.3e}, {lam[0]:.3e}])"
        )
    z = Q.T @ (x - mean)
    return float(z @ (z / lam))


def evaluate_criterion(criterion: Criterion, f, f_c) -> float:
    """The distance ``zeta(f, f_c)`` under a criterion.

    ``f`` and ``f_c`` are :class:`~fdepth.core.GridFunction` objects for the
    functional kinds, or plain vectors for ``mahalanobis``. Always
    nonnegative, and zero when ``f`` equals ``f_c`` for every norm kind.
    """
    kind = criterion.kind
    if kind == "mahalanobis":
        if criterion.cov is None:
            raise ValueError("mahalanobis criterion needs a covariance matrix")
        x = f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=float)
        if f_c is None:
            mu = criterion.mean
        else:
            mu = f_c.values if isinstance(f_c, GridFunction) else np.asarray(f_c, dtype=float)
        if mu is None:
            raise ValueError("mahalanobis criterion needs a center")
        return math.sqrt(mahalanobis_norm_sq(x, mu, criterion.cov))

    if kind in ("warp-l2", "warp-fisher-rao"):
        from . import warping

        gamma = warping.optimal_warping(f, f_c)
        if kind == "warp-l2":
            return warping.warp_l2_distance(gamma)
        return warping.fisher_rao_distance(gamma)

    diff = f - f_c
    if kind == "lp":
        return lp_norm(diff, criterion.p)
    if kind == "derivative-lp":
        return lp_norm(derivative(diff, criterion.r), criterion.p)

    if criterion.system is None:
        raise ValueError(f"criterion {criterion.tag} needs an eigensystem")
    coeffs = covkernel.kl_project(diff, criterion.system)
    if kind == "modified-rkhs":
        return math.sqrt(modified_norm_sq(coeffs, criterion.system, criterion.weights))
    return math.sqrt(rkhs_norm_sq(coeffs, criterion.system))
