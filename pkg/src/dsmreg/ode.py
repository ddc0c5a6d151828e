"""DSM by numerical integration: Dormand-Prince 5(4) with adaptive steps.

The integrator advances ``u' = -u + (T + a(s) I)^{-1} A^T f_delta`` with
``a(s) = a0 / (1 + s)`` from ``u(0) = (T + a0 I)^{-1} A^T f_delta`` and stops
at the end of the first accepted step whose residual lies in the relaxed
discrepancy band.

Cost accounting: the forcing term depends on ``s`` only, and the last two
stages of the tableau share the node ``s + h``, so one step needs six
distinct regularized solves.  Nothing is carried over between steps (no FSAL
reuse); each attempted step costs exactly six solves.
"""

from dataclasses import dataclass

import numpy as np

from .dsm import BAND_HIGH, BAND_LOW, Schedule, SolverResult, Status, in_band
from .regularization import ParameterError

# Dormand & Prince (1980) tableau.
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A_TABLE = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4


@dataclass(frozen=True)
class OdeConfig:
    abs_tol: float = 1e-6
    rel_tol: float = 1e-6
    h_init: float = 0.1
    safety: float = 0.9
    h_factor_min: float = 0.2
    h_factor_max: float = 5.0
    max_steps: int = 10_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 < self.h_factor_min < 1 < self.h_factor_max:
            raise ValueError("need 0 < h_factor_min < 1 < h_factor_max")
        if not self.h_init > 0:
            raise ValueError("h_init must be positive")


def dopri_step(rhs, t, y, h):
    """One Dormand-Prince step.

    Returns ``(y5, err)`` where ``err = y5 - y4`` is the embedded error
    estimate.  ``rhs`` is called seven times.
    """
    k = []
    for i in range(7):
        yi = y
        for j, aij in enumerate(A_TABLE[i]):
            if aij:
                yi = yi + h * aij * k[j]
        k.append(np.asarray(rhs(t + C[i] * h, yi), dtype=np.float64))
    K = np.stack(k)
    y5 = y + h * np.tensordot(B5, K, axes=1)
    err = h * np.tensordot(E, K, axes=1)
    return y5, err


def error_norm(err, y_old, y_new, cfg):
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((np.asarray(err) / scale) ** 2)))


def step_factor(err_norm, cfg):
    if err_norm == 0.0:
        return cfg.h_factor_max
    return min(cfg.h_factor_max, max(cfg.h_factor_min, cfg.safety * err_norm**-0.2))


def integrate(rhs, t0, y0, t_end, cfg=OdeConfig()):
    """Adaptive integration of a generic system from ``t0`` to ``t_end``.

    Returns ``(t, y, n_accepted, n_rejected)``.
    """
    t = float(t0)
    y = np.atleast_1d(np.asarray(y0, dtype=np.float64))
    h = min(cfg.h_init, t_end - t)
    acc = rej = 0
    while t < t_end:
        if acc + rej >= cfg.max_steps:
            raise RuntimeError(f"max_steps={cfg.max_steps} exhausted at t={t}")
        h = min(h, t_end - t)
        y_new, err = dopri_step(rhs, t, y, h)
        en = error_norm(err, y, y_new, cfg)
        fac = step_factor(en, cfg)
        if en <= 1.0:
            t, y = t + h, y_new
            acc += 1
        else:
            rej += 1
        h *= fac
    return t, y, acc, rej


def damping(a0, s):
    return a0 / (1.0 + s)


def dsm_rhs(ctx, a0, t, u):
    """``-u + (T + a(t) I)^{-1} g`` with ``a(t) = a0 / (1 + t)``; one counted solve."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return -u + ctx.solve(damping(a0, t))


def dopri45_dsm(ctx, delta, a0, cfg=OdeConfig()):
    """DSM-DOPRI45: integrate the DSM Cauchy problem until the residual
    enters ``[0.9 delta, 1.001 delta]``.

    A step that passes the error test but lands below the band is discarded
    and retried with half the step.  ``n_linsol`` in the result counts the
    initial solve plus six per attempted step.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    start = ctx.n_linsol
    sched = Schedule(t0=0.0)

    def result(u, res, status, a_final, message=""):
        return SolverResult(u, res, status, ctx.n_linsol - start, sched, a_final, message=message)

    try:
        u = ctx.solve(a0)
    except ParameterError as exc:
        return result(np.zeros(ctx.A.shape[1]), float("nan"), Status.FAILED, a0, str(exc))
    res = ctx.residual(u)
    if in_band(res, delta):
        return result(u, res, Status.CONVERGED, a0)

    t, h = 0.0, cfg.h_init
    memo = {}

    def rhs(s, y):
        # stage 7 shares its node with stage 6
        if s not in memo:
            memo[s] = ctx.solve(damping(a0, s))
        return -y + memo[s]

    for _ in range(cfg.max_steps):
        memo.clear()
        try:
            u_new, err = dopri_step(rhs, t, u, h)
        except ParameterError as exc:
            return result(u, res, Status.FAILED, exc.a, str(exc))
        en = error_norm(err, u, u_new, cfg)
        if en > 1.0:
            sched.rejected.append((t + h, damping(a0, t + h), h))
            h *= step_factor(en, cfg)
            continue
        res_new = ctx.residual(u_new)
        if res_new < BAND_LOW * delta:
            sched.rejected.append((t + h, damping(a0, t + h), h))
            sched.halved = True
            h *= 0.5
            continue
        t += h
        u, res = u_new, res_new
        sched.times.append(t)
        sched.a_values.append(damping(a0, t))
        sched.h_values.append(h)
        if res <= BAND_HIGH * delta:
            return result(u, res, Status.CONVERGED, damping(a0, t))
        h *= step_factor(en, cfg)
    return result(u, res, Status.ITERMAX, damping(a0, t), f"max_steps={cfg.max_steps} exhausted")
