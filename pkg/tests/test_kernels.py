"""The numba and numpy kernel variants implement the same algorithms."""

import numpy as np
import pytest

from dsmreg import kernels, problems


def _spd(n, seed=0):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


@pytest.mark.parametrize("n", [1, 2, 7, 40])
def test_cholesky_backends_agree(n):
    M = _spd(n)
    L1, i1 = kernels.cholesky_factor_loops(M)
    L2, i2 = kernels.cholesky_factor_numpy(M)
    assert i1 == i2 == -1
    np.testing.assert_allclose(L1, L2, rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(L1 @ L1.T, M, rtol=1e-12)
    b = np.arange(n, dtype=float)
    np.testing.assert_allclose(kernels.cholesky_solve_loops(L1, b), kernels.cholesky_solve_numpy(L2, b), rtol=1e-12)


def test_cholesky_failure_index_agrees():
    M = np.diag([1.0, 2.0, -1.0, 3.0])
    assert kernels.cholesky_factor_loops(M)[1] == kernels.cholesky_factor_numpy(M)[1] == 2


def test_power_iteration_backends_agree():
    M = problems.hilbert(12)
    a = kernels.power_iteration_loops(M, 1e-12, 1000)
    b = kernels.power_iteration_numpy(M, 1e-12, 1000)
    assert a[0] == pytest.approx(b[0], rel=1e-13)
    assert a[2] and b[2]


@pytest.mark.parametrize("n", [1, 2, 5, 30, 120])
def test_inv_hilbert_backends_agree(n):
    np.testing.assert_allclose(kernels.inv_hilbert_loops(n), kernels.inv_hilbert_numpy(n), rtol=1e-13)


def test_splitmix_backends_bitwise_equal():
    seed = np.uint64(123456789)
    a = kernels.splitmix64_uniform_loops(seed, 0, 1000)
    b = kernels.splitmix64_uniform_numpy(seed, 0, 1000)
    assert np.array_equal(a, b)
    assert np.all((a > 0) & (a < 1))


def test_splitmix_known_output():
    # SplitMix64 with state 0: first output 0xE220A8397B1DCDAF
    u = kernels.splitmix64_uniform_numpy(np.uint64(0), 0, 1)[0]
    assert u == ((0xE220A8397B1DCDAF >> 11) + 0.5) * 2.0**-53


def test_uniform_stream_is_counter_based():
    seed = np.uint64(99)
    full = kernels.splitmix64_uniform_numpy(seed, 0, 50)
    tail = kernels.splitmix64_uniform_numpy(seed, 20, 30)
    assert np.array_equal(full[20:], tail)


def test_box_muller_backends_agree():
    u = kernels.splitmix64_uniform_numpy(np.uint64(5), 0, 2000)
    a = kernels.box_muller_loops(u, 1999)
    b = kernels.box_muller_numpy(u, 1999)
    np.testing.assert_allclose(a, b, rtol=1e-15, atol=1e-15)


def test_standard_normal_moments():
    z = kernels.standard_normal(2024, 200_000)
    assert abs(z.mean()) < 0.01
    assert z.std() == pytest.approx(1.0, abs=0.01)
