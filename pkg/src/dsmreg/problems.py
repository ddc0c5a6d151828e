"""Test problems: Hilbert systems, inverse heat (Volterra) and deriv2 (Green's
function) discretizations, exact solution profiles, and seeded noise.

Noise generation is frozen so that instances are reproducible bit-for-bit on
a given kernel backend: component ``j`` of the raw noise vector is the
Box-Muller deviate built from SplitMix64 outputs ``2*(j//2)`` and
``2*(j//2)+1`` of the stream keyed by the instance seed (cosine branch for
even ``j``, sine branch for odd ``j``).  See :func:`dsmreg.kernels.standard_normal`.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dense import as_matrix, as_vector, max_eigenvalue

INV_HILBERT_MAX_N = 120

PROFILE_KINDS = ("sqrt", "square", "sine")
DERIV2_CASES = (1, 2, 3)


@dataclass(frozen=True)
class NoiseSpec:
    delta_rel: float
    seed: int = 0

    def __post_init__(self):
        if not self.delta_rel >= 0:
            raise ValueError(f"delta_rel must be nonnegative, got {self.delta_rel}")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A noisy linear system ``A u = f_delta`` with known exact solution ``y``."""

    A: np.ndarray
    y: np.ndarray
    f: np.ndarray
    f_delta: np.ndarray
    delta: float
    delta_rel: float
    seed: int
    label: str = ""

    @property
    def n(self):
        return self.A.shape[1]

    def rel_error(self, u):
        return float(np.linalg.norm(u - self.y) / np.linalg.norm(self.y))

    def to_dict(self):
        return {
            "n": int(self.n),
            "label": self.label,
            "seed": int(self.seed),
            "delta_rel": float(self.delta_rel),
            "delta": float(self.delta),
            "matrix": self.A.tolist(),
            "y": self.y.tolist(),
            "f": self.f.tolist(),
            "f_delta": self.f_delta.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        A = as_matrix(d["matrix"])
        if A.shape[1] != d["n"]:
            raise ValueError(f"matrix has {A.shape[1]} columns but n = {d['n']}")
        return cls(
            A=A,
            y=as_vector(d["y"]),
            f=as_vector(d["f"]),
            f_delta=as_vector(d["f_delta"]),
            delta=float(d["delta"]),
            delta_rel=float(d["delta_rel"]),
            seed=int(d["seed"]),
            label=d.get("label", ""),
        )

    def to_json(self, path=None):
        text = json.dumps(self.to_dict())
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, source):
        """Load from a JSON string or a path to a JSON file."""
        if isinstance(source, str) and source.lstrip().startswith("{"):
            return cls.from_dict(json.loads(source))
        with open(source, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Hilbert


def hilbert(n):
    """``H[i, j] = 1 / (i + j - 1)`` with 1-based indices."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(1, n + 1, dtype=np.float64)
    return 1.0 / (idx[:, None] + idx[None, :] - 1.0)


def inv_hilbert(n):
    """Exact inverse of :func:`hilbert` from the closed-form binomial formula.

    Binomials are accumulated multiplicatively in floating point, which keeps
    every entry finite up to ``n = 120``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > INV_HILBERT_MAX_N:
        raise OverflowError(f"inv_hilbert entries overflow double precision for n > {INV_HILBERT_MAX_N}")
    return kernels.inv_hilbert_kernel(int(n))


def cond_hilbert(n):
    """2-norm condition number of ``H_n`` as the product of the dominant
    eigenvalues of ``H_n`` and its analytic inverse."""
    return max_eigenvalue(hilbert(n)) * max_eigenvalue(inv_hilbert(n))


# ---------------------------------------------------------------------------
# Exact solution profiles


def exact_profile(kind, n, denominator=None):
    """Exact solution vector for the Hilbert experiments.

    ``x_i`` for 1-based ``i`` is ``sqrt(2*pi*(i-1)/m)``, ``((i-1)/m)**2`` or
    ``sin(2*pi*(i-1)/m)`` where ``m`` is ``denominator`` (default ``n``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n if denominator is None else denominator
    s = np.arange(n, dtype=np.float64) / m
    if kind == "sqrt":
        return np.sqrt(2.0 * np.pi * s)
    if kind == "square":
        return s**2
    if kind == "sine":
        return np.sin(2.0 * np.pi * s)
    raise ValueError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")


# ---------------------------------------------------------------------------
# Inverse heat conduction


def heat_kernel(t, kappa=1.0):
    """``k(t) = t**-1.5 / (2 kappa sqrt(pi)) * exp(-1 / (4 kappa**2 t))`` for t > 0."""
    t = np.asarray(t, dtype=np.float64)
    return t**-1.5 / (2.0 * kappa * math.sqrt(math.pi)) * np.exp(-1.0 / (4.0 * kappa**2 * t))


HEAT_PROFILES = ("piecewise", "smooth")


def heat_solution(n, profile="piecewise"):
    """Exact solution vector for the heat problem.

    ``"piecewise"`` (default): with ``tau = 20 i / n`` for 1-based
    ``i <= n // 2``, ``x_i`` is ``0.75 tau^2 / 4`` for ``tau < 2``,
    ``0.75 + (tau - 2)(3 - tau)`` for ``2 <= tau < 3`` and
    ``0.75 exp(-2 (tau - 3))`` beyond; the second half is zero.

    ``"smooth"``: the hump ``25 t^2 (1 - t) exp(-2t)`` at the quadrature
    nodes ``t_j = (j - 1/2) / n``.
    """
    if profile == "piecewise":
        x = np.zeros(n)
        tau = 20.0 * np.arange(1, n // 2 + 1) / n
        x[: n // 2] = np.where(
            tau < 2,
            0.75 * tau**2 / 4,
            np.where(tau < 3, 0.75 + (tau - 2) * (3 - tau), 0.75 * np.exp(-2 * (tau - 3))),
        )
        return x
    if profile == "smooth":
        t = (np.arange(n) + 0.5) / n
        return 25.0 * t**2 * (1.0 - t) * np.exp(-2.0 * t)
    raise ValueError(f"unknown heat profile {profile!r}; expected one of {HEAT_PROFILES}")


def heat_system(n, kappa=1.0, y=None, profile="piecewise"):
    """Midpoint/collocation discretization of the inverse heat Volterra
    equation on [0, 1].

    Quadrature nodes are ``t_j = (j - 1/2) h`` and collocation points
    ``s_i = i h`` with ``h = 1/n``; ``A[i, j] = h k(s_i - t_j)`` for
    ``i >= j``, zero above the diagonal, so ``A`` is lower-triangular
    Toeplitz.

    Returns ``(A, y)``.  ``y`` is :func:`heat_solution` for ``profile``
    unless an explicit vector is passed.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    h = 1.0 / n
    # s_i - t_j = (i - j + 1/2) h depends on i - j only
    diag_vals = h * heat_kernel((np.arange(n) + 0.5) * h, kappa)
    lag = np.arange(n)[:, None] - np.arange(n)[None, :]
    A = np.where(lag >= 0, diag_vals[np.clip(lag, 0, None)], 0.0)
    A = np.ascontiguousarray(A)
    if y is None:
        y = heat_solution(n, profile)
    else:
        y = as_vector(y)
        if y.shape[0] != n:
            raise ValueError(f"override solution has length {y.shape[0]}, expected {n}")
    return A, y


# ---------------------------------------------------------------------------
# Second derivative (Green's function kernel)


def deriv2_kernel(s, t):
    """Green's function ``s(t-1)`` for ``s < t`` and ``t(s-1)`` otherwise."""
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    return np.where(s < t, s * (t - 1.0), t * (s - 1.0))


def deriv2_solution(case, t):
    t = np.asarray(t, dtype=np.float64)
    if case == 1:
        return t.copy()
    if case == 2:
        return np.exp(t)
    if case == 3:
        return np.where(t < 0.5, t, 1.0 - t)
    raise ValueError(f"deriv2 case must be one of {DERIV2_CASES}, got {case!r}")


def deriv2_rhs(case, s):
    s = np.asarray(s, dtype=np.float64)
    if case == 1:
        return (s**3 - s) / 6.0
    if case == 2:
        return np.exp(s) + (1.0 - math.e) * s - 1.0
    if case == 3:
        return np.where(s < 0.5, (4 * s**3 - 3 * s) / 24.0, (-4 * s**3 + 12 * s**2 - 9 * s + 1) / 24.0)
    raise ValueError(f"deriv2 case must be one of {DERIV2_CASES}, got {case!r}")


DERIV2_DISCRETIZATIONS = ("midpoint", "galerkin")


def _cell_averages(fun, n, points=6):
    """Mean of ``fun`` over each cell ``[(i-1)/n, i/n]``, Gauss-Legendre on
    both sides of the kink at 1/2."""
    x, w = np.polynomial.legendre.leggauss(points)
    lo, hi = np.arange(n) / n, np.arange(1, n + 1) / n
    total = np.zeros(n)
    for a, b in ((lo, np.minimum(hi, 0.5)), (np.maximum(lo, 0.5), hi)):
        half = np.clip(b - a, 0.0, None) / 2
        mid = (a + b) / 2
        total += half * (fun(mid[:, None] + half[:, None] * x[None, :]) @ w)
    return total * n


def deriv2_system(n, case=1, discretization="midpoint"):
    """Discretized second-derivative problem.

    Returns ``(A, y, f_analytic)``.  ``"midpoint"`` collocates at the nodes
    ``(i - 1/2)/n`` with ``A[i, j] = K(s_i, t_j) / n`` and samples ``y`` and
    ``f_analytic`` there.  ``"galerkin"`` uses box functions: off-diagonal
    entries coincide with the midpoint ones, the diagonal holds the exact
    cell integral (larger by ``1/(6 n^2)``), and ``y``, ``f_analytic`` are
    cell averages.  ``f_analytic`` is kept for diagnostics; systems are
    always built with ``f = A @ y``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if case not in DERIV2_CASES:
        raise ValueError(f"deriv2 case must be one of {DERIV2_CASES}, got {case!r}")
    if discretization not in DERIV2_DISCRETIZATIONS:
        raise ValueError(f"discretization must be one of {DERIV2_DISCRETIZATIONS}")
    nodes = (np.arange(n) + 0.5) / n
    A = np.ascontiguousarray(deriv2_kernel(nodes[:, None], nodes[None, :]) / n)
    if discretization == "midpoint":
        return A, deriv2_solution(case, nodes), deriv2_rhs(case, nodes)
    A[np.diag_indices(n)] += 1.0 / (6.0 * n**2)
    y = _cell_averages(lambda t: deriv2_solution(case, t), n)
    return A, y, _cell_averages(lambda t: deriv2_rhs(case, t), n)


# ---------------------------------------------------------------------------
# Noisy instances


def noise_vector(seed, n):
    """Raw (unscaled) standard normal noise for ``seed``."""
    return kernels.standard_normal(seed, n)


def make_instance(A, y, noise, label=""):
    """Manufacture ``f = A y`` and add noise scaled to ``||e|| = delta_rel ||f||``."""
    A = as_matrix(A)
    y = as_vector(y)
    if A.shape[1] != y.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} vs ({y.shape[0]},)")
    f = A @ y
    fnorm = np.linalg.norm(f)
    if noise.delta_rel == 0:
        e = np.zeros_like(f)
    else:
        if fnorm == 0:
            raise ValueError("exact data is zero; relative noise level is undefined")
        e = noise_vector(noise.seed, f.shape[0])
        e *= noise.delta_rel * fnorm / np.linalg.norm(e)
    return ProblemInstance(
        A=A,
        y=y,
        f=f,
        f_delta=f + e,
        delta=float(np.linalg.norm(e)),
        delta_rel=float(noise.delta_rel),
        seed=int(noise.seed),
        label=label,
    )


def build_system(family, n, case=None):
    """``(A, y, label)`` for a problem family.

    ``case`` is the profile kind for ``hilbert`` (default ``"sqrt"``), the
    deriv2 case number (default 3, ``"3-galerkin"`` for the box-function
    discretization), and the exact-solution profile for ``heat`` (default
    ``"piecewise"``).
    """
    if family == "hilbert":
        kind = case or "sqrt"
        return hilbert(n), exact_profile(kind, n), f"hilbert-{kind}"
    if family == "heat":
        profile = case or "piecewise"
        A, y = heat_system(n, profile=profile)
        return A, y, f"heat-{profile}"
    if family == "deriv2":
        num, _, disc = str(case or 3).partition("-")
        c = int(num)
        A, y, _ = deriv2_system(n, c, disc or "midpoint")
        return A, y, f"deriv2-case{c}" + (f"-{disc}" if disc else "")
    raise ValueError(f"unknown problem family {family!r}")
