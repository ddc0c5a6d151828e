"""Regularized solution of ill-conditioned dense linear systems by the
iterative Dynamical Systems Method, with Tikhonov baselines and an
ODE-integrated variant."""

from ._jit import JIT_ENABLED, backend
from .dense import LowConfidenceWarning, NotPositiveDefiniteError, mat_vec, max_eigenvalue, spd_solve
from .dsm import Schedule, SolverResult, Status, dsm_solve, in_band
from .ode import OdeConfig, dopri45_dsm, dsm_rhs
from .problems import (
    NoiseSpec,
    ProblemInstance,
    cond_hilbert,
    deriv2_system,
    exact_profile,
    heat_system,
    hilbert,
    inv_hilbert,
    make_instance,
)
from .regularization import (
    A0Result,
    FindA0Error,
    NoiseDominatesError,
    ParameterError,
    RegContext,
    a_m_upper_bound,
    closed_form_u,
    find_a0,
    new_context,
    phi,
    solve_reg,
    step_update,
)
from .vr import VrResult, VrStatus, vr_i, vr_n

__version__ = "0.1.0"
