"""Dense real linear algebra.

Matrices are plain ``numpy`` float64 arrays stored C-contiguous (row-major);
vectors are 1-D float64 arrays.  The routines here validate shapes, route the
heavy lifting to :mod:`dsmreg.kernels`, and turn kernel status codes into
exceptions.
"""

import warnings

import numpy as np

from . import kernels


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky met a non-positive pivot."""

    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot})")


class LowConfidenceWarning(RuntimeWarning):
    """Power iteration stopped at its iteration cap."""


def as_matrix(M):
    M = np.ascontiguousarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    return M


def as_vector(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    return x


def is_symmetric(M, rtol=1e-12):
    """True if ``|M[i,j] - M[j,i]| <= rtol * (1 + |M[i,j]|)`` everywhere."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return bool(np.all(np.abs(M - M.T) <= rtol * (1.0 + np.abs(M))))


def mat_vec(M, x):
    """Dense product ``M @ x`` with a hard dimension check."""
    M = as_matrix(M)
    x = as_vector(x)
    if M.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {M.shape} @ ({x.shape[0]},)")
    return M @ x


def cholesky(M):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is not strictly positive.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    L, info = kernels.cholesky_factor(M)
    if info >= 0:
        raise NotPositiveDefiniteError(int(info))
    return L


def spd_solve(M, b):
    """Solve ``M u = b`` for symmetric positive definite ``M`` via Cholesky.

    A fresh factorization is computed on each call.  There is no pivoting or
    regularizing fallback: a failed factorization raises
    :class:`NotPositiveDefiniteError` and the caller decides what it means.
    """
    M = as_matrix(M)
    b = as_vector(b)
    if M.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {M.shape} vs ({b.shape[0]},)")
    L = cholesky(M)
    return kernels.cholesky_solve(L, b)


def power_iteration(M, tol=1e-10, maxiter=10_000):
    """Dominant eigenvalue of a symmetric PSD matrix.

    Returns
    -------
    estimate : float
        Rayleigh quotient at the last iterate, never above the true
        dominant eigenvalue.
    iterations : int
    converged : bool
        False when ``maxiter`` was hit before the relative change between
        successive estimates dropped below ``tol``.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    lam, it, ok = kernels.power_iteration(M, float(tol), int(maxiter))
    return float(lam), int(it), bool(ok)


def max_eigenvalue(M, tol=1e-10, maxiter=10_000):
    """Dominant eigenvalue estimate; warns with :class:`LowConfidenceWarning`
    if the iteration did not converge."""
    lam, it, ok = power_iteration(M, tol, maxiter)
    if not ok:
        warnings.warn(
            f"power iteration did not converge in {it} iterations", LowConfidenceWarning, stacklevel=2
        )
    return lam
