from fractions import Fraction

import numpy as np
import pytest

from dsmreg import problems
from dsmreg.dsm import Status, dsm_solve, in_band
from dsmreg.ode import (
    A_TABLE,
    B4,
    B5,
    C,
    OdeConfig,
    damping,
    dopri45_dsm,
    dopri_step,
    dsm_rhs,
    error_norm,
    integrate,
    step_factor,
)
from dsmreg.regularization import find_a0, new_context, solve_reg

from oracles import fixed_step_rk


def decay(t, y):
    return -y


def test_tableau_row_sums():
    for ci, row in zip(C, A_TABLE):
        assert sum(row) == pytest.approx(ci, abs=1e-15)
    assert B5.sum() == pytest.approx(1.0, abs=1e-15)
    assert B4.sum() == pytest.approx(1.0, abs=1e-15)
    # last stage row is the 5th-order weight vector (the FSAL property of the pair)
    np.testing.assert_array_equal(np.asarray(A_TABLE[6]), B5[:6])


def test_tableau_exact_rationals():
    assert Fraction(A_TABLE[4][0]).limit_denominator(10**5) == Fraction(19372, 6561)
    assert Fraction(B4[4]).limit_denominator(10**6) == Fraction(-92097, 339200)


def test_integrate_decay_default_tolerances():
    t, y, acc, rej = integrate(decay, 0.0, [1.0], 1.0)
    assert t == pytest.approx(1.0)
    assert abs(y[0] - np.exp(-1.0)) < 1e-6
    assert acc > 0


def test_integrate_system_matches_fixed_step():
    M = np.array([[-1.0, 0.5], [0.0, -2.0]])
    rhs = lambda t, y: M @ y + np.array([np.sin(t), 1.0])  # noqa: E731
    cfg = OdeConfig(abs_tol=1e-10, rel_tol=1e-10)
    _, y, _, _ = integrate(rhs, 0.0, [1.0, -1.0], 2.0, cfg)
    ref = fixed_step_rk(dopri_step, rhs, np.array([1.0, -1.0]), 2.0, 400)
    np.testing.assert_allclose(y, ref, rtol=1e-8)


def test_observed_order():
    def global_error(nsteps):
        y = fixed_step_rk(dopri_step, decay, np.array([1.0]), 1.0, nsteps)
        return abs(y[0] - np.exp(-1.0))

    errs = [global_error(n) for n in (8, 16, 32)]
    order = np.log2(errs[-2] / errs[-1])
    assert order == pytest.approx(5.0, abs=0.2)


def test_embedded_estimate_rate():
    hs = [0.1, 0.05, 0.025]
    ests = [abs(dopri_step(decay, 0.0, np.array([1.0]), h)[1][0]) for h in hs]
    rates = [np.log2(a / b) for a, b in zip(ests, ests[1:])]
    assert min(rates) >= 4.8


def test_step_factor_clamps():
    cfg = OdeConfig()
    assert step_factor(0.0, cfg) == cfg.h_factor_max
    assert step_factor(1e12, cfg) == cfg.h_factor_min
    assert step_factor(1.0, cfg) == pytest.approx(cfg.safety)


def test_error_norm_scale():
    cfg = OdeConfig(abs_tol=1.0, rel_tol=1e-300)
    assert error_norm(np.array([3.0, 4.0]), np.zeros(2), np.zeros(2), cfg) == pytest.approx(np.sqrt(12.5))


def test_config_validation():
    with pytest.raises(ValueError):
        OdeConfig(h_factor_min=1.5)
    with pytest.raises(ValueError):
        OdeConfig(abs_tol=0.0)


def test_dsm_rhs_stationary_and_count(hilbert10_instance):
    ctx = new_context(hilbert10_instance.A, hilbert10_instance.f_delta)
    a0, t = 1e-3, 2.0
    ustar = solve_reg(ctx, damping(a0, t))
    before = ctx.n_linsol
    r = dsm_rhs(ctx, a0, t, ustar)
    assert ctx.n_linsol == before + 1
    assert np.linalg.norm(r) <= 1e-12 * np.linalg.norm(ustar)
    with pytest.raises(ValueError):
        dsm_rhs(ctx, a0, -1.0, ustar)


def test_dsm_rhs_affine_slope():
    ctx = new_context(np.eye(3), [1.0, 0.0, 2.0])
    u, w = np.array([0.3, -1.0, 2.0]), np.array([1.0, 1.0, -4.0])
    diff = dsm_rhs(ctx, 0.5, 1.0, u + w) - dsm_rhs(ctx, 0.5, 1.0, u)
    np.testing.assert_allclose(diff, -w, rtol=1e-15)


def _dopri_setup(inst):
    base = new_context(inst.A, inst.f_delta)
    a0 = find_a0(base, inst.delta, inst.delta_rel).a0
    return base, a0


def test_six_solves_per_step(hilbert10_instance):
    base, a0 = _dopri_setup(hilbert10_instance)
    res = dopri45_dsm(base.fresh(), hilbert10_instance.delta, a0)
    steps = len(res.schedule.times) + len(res.schedule.rejected)
    assert res.n_linsol == 1 + 6 * steps
    assert res.status is Status.CONVERGED
    assert in_band(res.residual, hilbert10_instance.delta)


def test_dopri_cost_far_above_iterative(hilbert100_instance):
    base, a0 = _dopri_setup(hilbert100_instance)
    ode_res = dopri45_dsm(base.fresh(), hilbert100_instance.delta, a0)
    it_res = dsm_solve(base.fresh(), hilbert100_instance.delta, a0)
    assert ode_res.status is Status.CONVERGED
    assert ode_res.n_linsol >= 10 * it_res.n_linsol
    assert in_band(base.fresh().residual(ode_res.u), hilbert100_instance.delta)


def test_dopri_max_steps(hilbert100_instance):
    base, a0 = _dopri_setup(hilbert100_instance)
    res = dopri45_dsm(base.fresh(), hilbert100_instance.delta, a0, OdeConfig(max_steps=2))
    assert res.status is Status.ITERMAX
    assert res.n_linsol == 1 + 12


def test_dopri_start_in_band():
    ctx = new_context(np.eye(1), [1.0])
    res = dopri45_dsm(ctx, 0.01, 1.0 / 0.99 - 1.0)
    assert res.status is Status.CONVERGED
    assert res.n_linsol == 1
