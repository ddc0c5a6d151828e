"""Variational (Tikhonov) regularization baselines.

``vr_i`` evaluates the regularized solution at the starting parameter.
``vr_n`` locates the Morozov parameter ``phi(a) = delta`` with a secant
iteration, which needs one solve per step and no derivative solves.  The
secant runs in ``log a`` by default: ``phi`` behaves roughly like a power of
``a`` near the root, and a plain secant in ``a`` can step to negative values
where ``phi`` is concave.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .regularization import ParameterError


class VrStatus(str, enum.Enum):
    OK = "ok"
    RESTARTED_OK = "restarted-ok"
    FAILED = "failed"

    def __str__(self):
        return self.value


@dataclass
class VrResult:
    u: np.ndarray = field(repr=False)
    a_used: float
    n_linsol: int
    status: VrStatus
    residual: float
    trace: list = field(default_factory=list, repr=False)
    message: str = ""


def vr_i(ctx, a0):
    """Tikhonov solution at ``a0``: exactly one counted solve."""
    start = ctx.n_linsol
    u = ctx.solve(a0)
    return VrResult(u, a0, ctx.n_linsol - start, VrStatus.OK, ctx.residual(u))


class _Diverged(Exception):
    pass


_VARIABLES = {
    "log": (math.log, math.exp),
    "linear": (float, float),
}


def _secant(ctx, delta, a_prev, a_cur, rtol, maxiter, trace, variable="log"):
    fwd, back = _VARIABLES[variable]

    def evaluate(a):
        if not (math.isfinite(a) and a > 0):
            raise _Diverged(f"iterate a = {a!r} left the positive reals")
        try:
            u = ctx.solve(a)
        except ParameterError as exc:
            raise _Diverged(str(exc)) from exc
        r = ctx.residual(u)
        trace.append((a, r))
        return u, r - delta

    _, r_prev = evaluate(a_prev)
    u, r_cur = evaluate(a_cur)
    for _ in range(maxiter):
        if abs(r_cur) <= rtol * delta:
            return a_cur, u, r_cur + delta
        if abs(a_cur - a_prev) < 1e-12 * a_cur:
            return a_cur, u, r_cur + delta
        if r_cur == r_prev:
            raise _Diverged("flat secant")
        x_cur, x_prev = fwd(a_cur), fwd(a_prev)
        x_next = x_cur - r_cur * (x_cur - x_prev) / (r_cur - r_prev)
        try:
            a_next = back(x_next)
        except OverflowError as exc:
            raise _Diverged(f"iterate exp({x_next!r}) overflowed") from exc
        a_prev, r_prev = a_cur, r_cur
        a_cur = a_next
        u, r_cur = evaluate(a_cur)
    if abs(r_cur) <= rtol * delta:
        return a_cur, u, r_cur + delta
    raise _Diverged(f"no convergence in {maxiter} iterations")


def vr_n(ctx, delta, a0, rtol=1e-3, maxiter=50, variable="log"):
    """Tikhonov solution at the Morozov parameter, found by secant steps.

    The secant starts from ``(a0, a0/2)`` and stops when
    ``|phi(a) - delta| <= rtol * delta`` or successive iterates agree to
    1e-12 relative.  If it diverges (non-positive or non-finite iterate,
    failed factorization, ``maxiter`` steps) it restarts once from
    ``(a0/2, a0/4)``.

    Parameters
    ----------
    variable : {"log", "linear"}
        Secant in ``log a`` (iterates stay positive) or in ``a`` itself.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if variable not in _VARIABLES:
        raise ValueError(f"variable must be one of {tuple(_VARIABLES)}")
    start = ctx.n_linsol
    trace = []
    attempts = ((a0, 0.5 * a0, VrStatus.OK), (0.5 * a0, 0.25 * a0, VrStatus.RESTARTED_OK))
    message = ""
    for a_prev, a_cur, status in attempts:
        try:
            a, u, res = _secant(ctx, delta, a_prev, a_cur, rtol, maxiter, trace, variable)
        except _Diverged as exc:
            message = str(exc)
            continue
        return VrResult(u, a, ctx.n_linsol - start, status, res, trace)
    return VrResult(
        np.zeros(ctx.A.shape[1]), float("nan"), ctx.n_linsol - start, VrStatus.FAILED, float("nan"), trace, message
    )
