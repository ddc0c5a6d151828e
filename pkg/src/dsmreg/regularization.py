"""Shared Tikhonov machinery: the regularization context, counted solves of
``(T + a I) u = A^T f_delta``, the discrepancy function, the a_M upper bound,
the search for a starting parameter, and the exponential step update.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dense import NotPositiveDefiniteError, as_matrix, as_vector, max_eigenvalue, spd_solve


class ParameterError(ArithmeticError):
    """A regularized solve failed because ``a`` is below the rounding floor."""

    def __init__(self, a, message=None):
        self.a = a
        super().__init__(message or f"T + aI is not numerically positive definite at a = {a!r}")


class NoiseDominatesError(ValueError):
    """``||f_delta|| <= delta``: the data carry no usable signal."""


class FindA0Error(RuntimeError):
    def __init__(self, message, trace):
        self.trace = trace
        super().__init__(message)


_solves_total = 0


def total_solves():
    """Regularized solves performed by this process on any context."""
    return _solves_total


class RegContext:
    """Cached normal-equation data for one solver run.

    ``n_linsol`` counts calls to :meth:`solve` and never decreases.  A context
    is meant to be owned by a single solver run; the counter is not
    synchronized.
    """

    def __init__(self, A, f_delta, T=None, g=None, norm_A_sq=None):
        A = as_matrix(A)
        f_delta = as_vector(f_delta)
        if A.shape[0] != f_delta.shape[0]:
            raise ValueError(f"dimension mismatch: {A.shape} vs ({f_delta.shape[0]},)")
        self.A = A
        self.f_delta = f_delta
        if T is None:
            T = A.T @ A
            T = np.ascontiguousarray(0.5 * (T + T.T))
        self.T = T
        self.g = A.T @ f_delta if g is None else g
        self.norm_A_sq = max_eigenvalue(T) if norm_A_sq is None else norm_A_sq
        self.f_delta_norm = float(np.linalg.norm(f_delta))
        self.n_linsol = 0

    def fresh(self):
        """A new context sharing the cached data, with its counter at zero."""
        return RegContext(self.A, self.f_delta, self.T, self.g, self.norm_A_sq)

    def solve(self, a):
        global _solves_total
        if not a > 0:
            raise ValueError(f"regularization parameter must be positive, got {a!r}")
        self.n_linsol += 1
        _solves_total += 1
        M = self.T.copy()
        M[np.diag_indices_from(M)] += a
        try:
            return spd_solve(M, self.g)
        except NotPositiveDefiniteError as exc:
            raise ParameterError(a) from exc

    def residual(self, u):
        return float(np.linalg.norm(self.A @ u - self.f_delta))


def new_context(A, f_delta):
    return RegContext(A, f_delta)


def solve_reg(ctx, a):
    """``u_a = (T + a I)^{-1} A^T f_delta``; one counted solve."""
    return ctx.solve(a)


def phi(ctx, a):
    """Discrepancy ``||A u_a - f_delta||``; one counted solve."""
    return ctx.residual(ctx.solve(a))


def a_m_upper_bound(ctx, delta):
    """Upper bound ``delta ||A||^2 / (||f_delta|| - delta)`` on the Morozov parameter."""
    gap = ctx.f_delta_norm - delta
    if not gap > 0:
        raise NoiseDominatesError(f"||f_delta|| = {ctx.f_delta_norm} does not exceed delta = {delta}")
    return delta * ctx.norm_A_sq / gap


@dataclass
class A0Result:
    a0: float
    c: float
    iterations: int
    u: np.ndarray = field(repr=False)
    trace: list = field(default_factory=list, repr=False)


def initial_a0_guess(ctx, delta_rel):
    return ctx.norm_A_sq * delta_rel / 3.0


def find_a0(ctx, delta, delta_rel, max_iter=100, bracket=True):
    """Search for ``a0`` with ``1 <= phi(a0) / delta <= 2``.

    Starts from ``||A||^2 delta_rel / 3``.  While the ratio ``c`` is out of
    range: ``c > 3`` takes ``a0 * 0.5 / (c - 1)``, ``2 < c <= 3`` divides by 3
    and ``c < 1`` multiplies by 3.  Every evaluation is one counted solve, so
    the search costs ``1 + iterations`` solves.

    The factor-3 moves can cycle when ``phi`` is close to linear over the
    window (``c`` alternating just above 2 and just below 1).  With
    ``bracket=True`` the largest rejected ``a`` with ``c < 1`` and the
    smallest with ``c > 2`` are remembered, and a trial landing outside that
    bracket is replaced by the geometric midpoint.  Runs that never overshoot
    follow the plain rules exactly.

    Raises
    ------
    FindA0Error
        After ``max_iter`` updates without meeting the condition; carries the
        ``(a, c)`` trace.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not ctx.f_delta_norm > delta:
        raise NoiseDominatesError(f"||f_delta|| = {ctx.f_delta_norm} does not exceed delta = {delta}")
    a = initial_a0_guess(ctx, delta_rel)
    u = ctx.solve(a)
    c = ctx.residual(u) / delta
    trace = [(a, c)]
    lo, hi = 0.0, math.inf
    it = 0
    while c > 2 or c < 1:
        if it >= max_iter:
            raise FindA0Error(f"find_a0 did not terminate in {max_iter} iterations", trace)
        it += 1
        if c > 2:
            hi = min(hi, a)
        else:
            lo = max(lo, a)
        if c > 3:
            a = 0.5 * a / (c - 1)
        elif c > 2:
            a = a / 3
        else:
            a = 3 * a
        if bracket and not lo < a < hi:
            a = math.sqrt(lo * hi)
        u = ctx.solve(a)
        c = ctx.residual(u) / delta
        trace.append((a, c))
    return A0Result(a0=a, c=c, iterations=it, u=u, trace=trace)


def step_update(u, v, h):
    """``exp(-h) u + (1 - exp(-h)) v``.

    ``1 - exp(-h)`` is formed with ``expm1`` so small steps do not cancel.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    return np.exp(-h) * u - np.expm1(-h) * v


def closed_form_u(ctx, u0, schedule):
    """Evaluate the DSM solution for a piecewise-constant damping schedule
    as a partial sum instead of a recursion.

    With step end times ``t_1 < ... < t_n`` (start ``t_0``) and damping
    ``a_i`` on ``(t_{i-1}, t_i]``::

        u_n = e^{t_0 - t_n} u0 + sum_i (e^{t_i - t_n} - e^{t_{i-1} - t_n}) (T + a_i)^{-1} g

    Exponents are taken relative to ``t_n`` so nothing overflows.  Each term
    costs one counted solve on ``ctx``.
    """
    u0 = as_vector(u0)
    times = np.asarray(schedule.times, dtype=np.float64)
    if times.size == 0:
        return u0.copy()
    edges = np.concatenate(([schedule.t0], times))
    if np.any(np.diff(edges) <= 0):
        raise ValueError("schedule times must be strictly increasing")
    tn = edges[-1]
    out = np.exp(edges[0] - tn) * u0
    for i, a in enumerate(schedule.a_values, start=1):
        w = np.exp(edges[i] - tn) - np.exp(edges[i - 1] - tn)
        out = out + w * ctx.solve(a)
    return out
