"""Self-contained special functions for the closed-form depth expressions.

Only two distribution functions are needed: the standard normal CDF and the
chi-square CDF. The normal CDF wraps the C library's erfc; the chi-square CDF
is the regularized lower incomplete gamma function P(k/2, x/2), computed by
the classic series / continued-fraction pair. Both are accurate to about
1e-12, far tighter than any statistical tolerance in the package, so they
double as reusable oracles.
"""

from __future__ import annotations

import math

__all__ = [
    "std_normal_cdf",
    "std_normal_quantile",
    "regularized_lower_gamma",
    "chi2_cdf",
    "chi2_quantile",
]

_EPS = 1e-15
_MAX_ITER = 500


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF Phi(x), via the complementary error function."""
    return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))


def _lower_gamma_series(a: float, x: float) -> float:
    """P(a, x) by its power series; converges well for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _upper_gamma_cf(a: float, x: float) -> float:
    """Q(a, x) by the Lentz continued fraction; converges well for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0."""
    a = float(a)
    x = float(x)
    if a <= 0.0:
        raise ValueError(f"need a > 0, got {a}")
    if x < 0.0:
        raise ValueError(f"need x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(_lower_gamma_series(a, x), 1.0)
    return max(1.0 - _upper_gamma_cf(a, x), 0.0)


def chi2_cdf(x: float, k: float) -> float:
    """Chi-square CDF with k degrees of freedom at x."""
    k = float(k)
    if k <= 0.0:
        raise ValueError(f"degrees of freedom must be positive, got {k}")
    if x <= 0.0:
        return 0.0
    return regularized_lower_gamma(k / 2.0, float(x) / 2.0)


def _bisect_increasing(fn, target: float, lo: float, hi: float) -> float:
    """Invert a continuous increasing function by bisection."""
    flo = fn(lo) - target
    fhi = fn(hi) - target
    if flo > 0.0 or fhi < 0.0:
        raise ValueError("target not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fn(mid) - target <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def std_normal_quantile(q: float) -> float:
    """Inverse of the standard normal CDF on (0, 1)."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q}")
    return _bisect_increasing(std_normal_cdf, q, -40.0, 40.0)


def chi2_quantile(q: float, k: float) -> float:
    """Inverse chi-square CDF with k degrees of freedom on [0, 1)."""
    q = float(q)
    if not 0.0 <= q < 1.0:
        raise ValueError(f"quantile level must lie in [0, 1), got {q}")
    if q == 0.0:
        return 0.0
    hi = max(4.0 * k, 100.0)
    while chi2_cdf(hi, k) < q:
        hi *= 2.0
    return _bisect_increasing(lambda x: chi2_cdf(x, k), q, 0.0, hi)
