"""Hot numeric kernels.

Every kernel exists twice: a loop implementation compiled with numba, and a
vectorized numpy implementation of the same algorithm.  The module-level
names (``cholesky_factor``, ``cholesky_solve`` ...) point at whichever
backend :mod:`dsmreg._jit` selected.  Both variants are importable under
``*_loops`` / ``*_numpy`` names so they can be cross-checked and benchmarked
against each other.

Matrices are C-contiguous (row-major) float64 arrays throughout.
"""

import numpy as np

from ._jit import JIT_ENABLED, njit

# SplitMix64 constants.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 2.0**-53


# ---------------------------------------------------------------------------
# Cholesky


def _cholesky_factor_loops(M):
    """Lower Cholesky factor of ``M``.

    Returns ``(L, info)``; ``info`` is -1 on success, otherwise the index of
    the first non-positive pivot (``L`` is then partially filled).
    """
    n = M.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        d = M[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > 0.0:
            return L, j
        ljj = np.sqrt(d)
        L[j, j] = ljj
        for i in range(j + 1, n):
            s = M[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / ljj
    return L, -1


def _cholesky_factor_numpy(M):
    n = M.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        row = L[j, :j]
        d = M[j, j] - row @ row
        if not d > 0.0:
            return L, j
        ljj = np.sqrt(d)
        L[j, j] = ljj
        L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ row) / ljj
    return L, -1


def _cholesky_solve_loops(L, b):
    """Solve ``L L^T x = b`` by forward then backward substitution."""
    n = L.shape[0]
    z = np.empty(n)
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * z[k]
        z[i] = s / L[i, i]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        s = z[i]
        for k in range(i + 1, n):
            s -= L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x


def _cholesky_solve_numpy(L, b):
    n = L.shape[0]
    z = np.empty(n)
    for i in range(n):
        z[i] = (b[i] - L[i, :i] @ z[:i]) / L[i, i]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (z[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x


# ---------------------------------------------------------------------------
# Power iteration


def _power_iteration_loops(M, tol, maxiter):
    """Rayleigh-quotient power iteration from the normalized all-ones vector.

    Returns ``(estimate, iterations, converged)``.  Norms are computed with
    max-abs scaling so matrices with entries near the double range work.
    """
    n = M.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    y = np.empty(n)
    lam = 0.0
    for it in range(1, maxiter + 1):
        for i in range(n):
            s = 0.0
            for k in range(n):
                s += M[i, k] * x[k]
            y[i] = s
        new = 0.0
        for i in range(n):
            new += x[i] * y[i]
        scale = 0.0
        for i in range(n):
            if abs(y[i]) > scale:
                scale = abs(y[i])
        if scale == 0.0:
            return 0.0, it, True
        ss = 0.0
        for i in range(n):
            ss += (y[i] / scale) ** 2
        norm = scale * np.sqrt(ss)
        for i in range(n):
            x[i] = y[i] / norm
        if it > 1 and abs(new - lam) < tol * abs(new):
            return new, it, True
        lam = new
    return lam, maxiter, False


def _power_iteration_numpy(M, tol, maxiter):
    n = M.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for it in range(1, maxiter + 1):
        y = M @ x
        new = float(x @ y)
        scale = np.abs(y).max()
        if scale == 0.0:
            return 0.0, it, True
        x = y / (scale * np.sqrt(np.sum((y / scale) ** 2)))
        if it > 1 and abs(new - lam) < tol * abs(new):
            return new, it, True
        lam = new
    return lam, maxiter, False


# ---------------------------------------------------------------------------
# Analytic Hilbert inverse


def _binom_loops(m, k):
    # multiplicative accumulation keeps every partial product an integer
    r = 1.0
    for l in range(1, k + 1):
        r = r * (m - k + l) / l
    return r


def _inv_hilbert_loops(n):
    H = np.empty((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            b = _binom_loops(i + j - 2, i - 1)
            v = (i + j - 1) * _binom_loops(n + i - 1, n - j) * _binom_loops(n + j - 1, n - i) * b * b
            H[i - 1, j - 1] = -v if (i + j) % 2 else v
    return H


def _binom_numpy(m, k):
    m = np.asarray(m, dtype=np.float64)
    k = np.asarray(k)
    r = np.ones(np.broadcast(m, k).shape)
    for l in range(1, int(k.max(initial=0)) + 1):
        active = k >= l
        r = np.where(active, r * (m - k + l) / l, r)
    return r


def _inv_hilbert_numpy(n):
    idx = np.arange(1, n + 1)
    i, j = np.meshgrid(idx, idx, indexing="ij")
    b = _binom_numpy(i + j - 2, i - 1)
    v = (i + j - 1) * _binom_numpy(n + i - 1, n - j) * _binom_numpy(n + j - 1, n - i) * b * b
    return np.where((i + j) % 2 == 1, -v, v)


# ---------------------------------------------------------------------------
# Counter-based normal deviates (SplitMix64 + Box-Muller)


def _splitmix64_uniform_loops(seed, start, count):
    """Uniforms in (0, 1) from SplitMix64 outputs ``start .. start+count-1``.

    Output ``k`` mixes ``seed + (k + 1) * GAMMA (mod 2**64)``; it depends only
    on ``(seed, k)``.
    """
    out = np.empty(count)
    for c in range(count):
        z = seed + np.uint64(start + c + 1) * _GAMMA
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        z = z ^ (z >> _S31)
        out[c] = (np.float64(z >> _S11) + 0.5) * _TWO_M53
    return out


def _splitmix64_uniform_numpy(seed, start, count):
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + k * _GAMMA
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return ((z >> _S11).astype(np.float64) + 0.5) * _TWO_M53


def _box_muller_loops(u, count):
    out = np.empty(count)
    for j in range(count):
        p = j // 2
        r = np.sqrt(-2.0 * np.log(u[2 * p]))
        theta = 2.0 * np.pi * u[2 * p + 1]
        out[j] = r * np.cos(theta) if j % 2 == 0 else r * np.sin(theta)
    return out


def _box_muller_numpy(u, count):
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * r.size)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


# ---------------------------------------------------------------------------
# Backend selection

cholesky_factor_loops = njit(cache=True)(_cholesky_factor_loops)
cholesky_solve_loops = njit(cache=True)(_cholesky_solve_loops)
power_iteration_loops = njit(cache=True)(_power_iteration_loops)
_binom_loops = njit(cache=True)(_binom_loops)
inv_hilbert_loops = njit(cache=True)(_inv_hilbert_loops)
splitmix64_uniform_loops = njit(cache=True)(_splitmix64_uniform_loops)
box_muller_loops = njit(cache=True)(_box_muller_loops)

if not JIT_ENABLED:
    # interpreted uint64 arithmetic warns on the (intended) wrap-around
    def splitmix64_uniform_loops(seed, start, count):
        with np.errstate(over="ignore"):
            return _splitmix64_uniform_loops(seed, start, count)


cholesky_factor_numpy = _cholesky_factor_numpy
cholesky_solve_numpy = _cholesky_solve_numpy
power_iteration_numpy = _power_iteration_numpy
inv_hilbert_numpy = _inv_hilbert_numpy
splitmix64_uniform_numpy = _splitmix64_uniform_numpy
box_muller_numpy = _box_muller_numpy

if JIT_ENABLED:
    cholesky_factor = cholesky_factor_loops
    cholesky_solve = cholesky_solve_loops
    power_iteration = power_iteration_loops
    inv_hilbert_kernel = inv_hilbert_loops
    splitmix64_uniform = splitmix64_uniform_loops
    box_muller = box_muller_loops
else:
    cholesky_factor = cholesky_factor_numpy
    cholesky_solve = cholesky_solve_numpy
    power_iteration = power_iteration_numpy
    inv_hilbert_kernel = inv_hilbert_numpy
    splitmix64_uniform = splitmix64_uniform_numpy
    box_muller = box_muller_numpy


def standard_normal(seed, count):
    """``count`` standard normal deviates for ``seed`` (pure function)."""
    seed = np.uint64(int(seed) % 2**64)
    u = splitmix64_uniform(seed, 0, 2 * ((count + 1) // 2))
    return box_muller(u, count)
