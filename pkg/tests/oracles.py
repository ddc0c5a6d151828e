"""Independent reference computations used only by the tests."""

from fractions import Fraction

import numpy as np

# dominant eigenvalue of hilbert(3): bisection on the exact rational
# characteristic polynomial (80 halvings of [1, 2])
H3_LAMBDA_MAX = 1.408318927123654


def gauss_pivot_solve(M, b):
    """Gaussian elimination with partial pivoting, row by row."""
    M = np.array(M, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = len(b)
    for c in range(n):
        p = c + int(np.argmax(np.abs(M[c:, c])))
        if p != c:
            M[[c, p]] = M[[p, c]]
            b[[c, p]] = b[[p, c]]
        for r in range(c + 1, n):
            f = M[r, c] / M[c, c]
            M[r, c:] -= f * M[c, c:]
            b[r] -= f * b[c]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - M[i, i + 1 :] @ x[i + 1 :]) / M[i, i]
    return x


def exact_inverse(rows):
    """Gauss-Jordan inverse over the rationals."""
    n = len(rows)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def tikhonov_residual(A, f_delta, a):
    """||A u_a - f_delta|| with u_a from pivoted elimination on the normal equations."""
    T = A.T @ A + a * np.eye(A.shape[1])
    u = gauss_pivot_solve(T, A.T @ f_delta)
    return float(np.linalg.norm(A @ u - f_delta))


def bisect_root(fun, lo, hi, rtol=1e-12, maxiter=400):
    """Root of an increasing function on [lo, hi], bisecting in log(a)."""
    flo, fhi = fun(lo), fun(hi)
    if not (flo < 0 < fhi):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(maxiter):
        mid = np.sqrt(lo * hi)
        if fun(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def fixed_step_rk(step, rhs, y0, t_end, nsteps):
    h = t_end / nsteps
    y = np.atleast_1d(np.asarray(y0, dtype=np.float64))
    t = 0.0
    for _ in range(nsteps):
        y, _ = step(rhs, t, y, h)
        t += h
    return y


class SvdDiscrepancy:
    """phi(a) = ||A u_a - f_delta|| through the SVD of A.

    With A = U S V^T the Tikhonov residual is
    ``|| a (S^2 + a)^{-1} U^T f ||`` plus the part of f outside range(U), which
    stays well defined for any a > 0 where a Cholesky factorization of
    A^T A + a I would break down.
    """

    def __init__(self, A, f_delta):
        U, s, _ = np.linalg.svd(np.asarray(A, dtype=np.float64))
        self.s2 = s**2
        self.beta = U.T @ f_delta

    def __call__(self, a):
        return float(np.linalg.norm(a / (self.s2 + a) * self.beta))
