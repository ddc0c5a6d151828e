"""Iterative Dynamical Systems Method.

The Cauchy problem ``u' = -u + (T + a(t))^{-1} A^T f_delta`` is advanced in
closed form over intervals on which the damping is held constant,
``a = a0 / t``, with geometrically growing steps ``h <- q h``.  Iteration
stops once the residual enters the relaxed discrepancy band
``[0.9 delta, 1.001 delta]``.  A trial step that overshoots below the band is
discarded, the step is halved, and geometric growth is switched off for the
rest of the run.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .regularization import ParameterError, step_update

BAND_LOW = 0.9
BAND_HIGH = 1.001


class Status(str, enum.Enum):
    CONVERGED = "converged-in-band"
    ITERMAX = "itermax-exhausted"
    FAILED = "failed"

    def __str__(self):
        return self.value


@dataclass
class Schedule:
    """Executed damping/step sequence.

    ``times``, ``a_values`` and ``h_values`` describe accepted steps only
    (``times`` are step end points, the first step starts at ``t0``).
    Rejected trial steps are kept in ``rejected`` as ``(t_trial, a, h)``.
    """

    t0: float = 1.0
    times: list = field(default_factory=list)
    a_values: list = field(default_factory=list)
    h_values: list = field(default_factory=list)
    halved: bool = False
    rejected: list = field(default_factory=list)


@dataclass
class SolverResult:
    u: np.ndarray = field(repr=False)
    residual: float
    status: Status
    n_linsol: int
    schedule: Schedule = field(default_factory=Schedule, repr=False)
    a_final: float = float("nan")
    rel_error: float = None
    message: str = ""


def in_band(residual, delta):
    """Relaxed discrepancy test ``0.9 delta <= residual <= 1.001 delta``."""
    return BAND_LOW * delta <= residual <= BAND_HIGH * delta


def dsm_solve(ctx, delta, a0, q=2.0, itermax=30):
    """Run the iterative DSM from ``u = (T + a0 I)^{-1} A^T f_delta``.

    ``a0`` should satisfy ``delta < phi(a0) <= 2 delta`` (see
    :func:`dsmreg.regularization.find_a0`).  Every pass of the loop performs
    one counted solve, whether its trial step is accepted or not.

    Returns a :class:`SolverResult` whose ``n_linsol`` counts the solves made
    here (the context counter may already hold earlier ones).  A failed
    factorization yields status ``failed`` with the offending ``a`` in
    ``message``; running out of passes returns the last accepted iterate with
    status ``itermax-exhausted``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not 1.0 <= q <= 2.0:
        raise ValueError(f"q must lie in [1, 2], got {q}")
    start = ctx.n_linsol
    sched = Schedule(t0=1.0)

    def result(u, res, status, a_final, message=""):
        return SolverResult(u, res, status, ctx.n_linsol - start, sched, a_final, message=message)

    try:
        u = ctx.solve(a0)
    except ParameterError as exc:
        return result(np.zeros(ctx.A.shape[1]), float("nan"), Status.FAILED, a0, str(exc))
    res = ctx.residual(u)
    a_last = a0
    t, h = 1.0, 1.0
    i = 0
    while BAND_HIGH * delta < res and i < itermax:
        i += 1
        t_trial = t + h
        a = a0 / t_trial
        try:
            v = ctx.solve(a)
        except ParameterError as exc:
            return result(u, res, Status.FAILED, a, str(exc))
        u_trial = step_update(u, v, h)
        res_trial = ctx.residual(u_trial)
        if BAND_LOW * delta < res_trial:
            u, res, t, a_last = u_trial, res_trial, t_trial, a
            sched.times.append(t)
            sched.a_values.append(a)
            sched.h_values.append(h)
            if not sched.halved:
                h *= q
        else:
            sched.rejected.append((t_trial, a, h))
            h /= 2
            sched.halved = True

    if in_band(res, delta):
        return result(u, res, Status.CONVERGED, a_last)
    if res <= BAND_HIGH * delta:
        # only reachable when the starting residual is already below the band
        return result(u, res, Status.FAILED, a_last, f"initial residual {res:.6g} below band; a0 too small")
    return result(u, res, Status.ITERMAX, a_last, f"no band entry after {itermax} passes")
