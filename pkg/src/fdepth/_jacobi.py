"""Cyclic Jacobi eigendecomposition for symmetric matrices.

Self-contained solver used for every eigenproblem in the package. The kernel
is jitted with numba when available (pure-Python execution otherwise, same
code path). Convergence is declared when the off-diagonal Frobenius norm
drops below 1e-12 times the Frobenius norm of the input; the sweep cap is
100, after which the caller treats the input as pathological.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


OFF_DIAG_TOL = 1e-12
MAX_SWEEPS = 100


class JacobiConvergenceError(RuntimeError):
    """The sweep cap was reached before the off-diagonal norm vanished."""


@njit(cache=True, nogil=True)
def _sweeps(A, V, tol, max_sweeps):  # pragma: no cover - exercised via wrapper
    m = A.shape[0]
    fro = 0.0
    for i in range(m):
        for j in range(m):
            fro += A[i, j] * A[i, j]
    fro = math.sqrt(fro)
    if fro == 0.0:
        return 0
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(m - 1):
            for j in range(i + 1, m):
                off += A[i, j] * A[i, j]
        if math.sqrt(2.0 * off) <= tol * fro:
            return sweep
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app = A[p, p]
                aqq = A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(m):
                    if k != p and k != q:
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * akq
                        A[p, k] = A[k, p]
                        A[k, q] = s * akp + c * akq
                        A[q, k] = A[k, q]
                for k in range(m):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    # one final convergence check after the last sweep
    off = 0.0
    for i in range(m - 1):
        for j in range(i + 1, m):
            off += A[i, j] * A[i, j]
    if math.sqrt(2.0 * off) <= tol * fro:
        return max_sweeps
    return -1


def jacobi_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of a symmetric matrix.

    Returns ``(values, vectors)`` sorted by descending eigenvalue, with
    eigenvectors in the columns of ``vectors``.
    """
    A = np.array(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    m = A.shape[0]
    V = np.eye(m)
    status = _sweeps(A, V, OFF_DIAG_TOL, MAX_SWEEPS)
    if status < 0:
        raise JacobiConvergenceError(
            f"Jacobi did not converge within {MAX_SWEEPS} sweeps"
        )
    values = np.diag(A).copy()
    order = np.argsort(values)[::-1]
    return values[order], V[:, order]
