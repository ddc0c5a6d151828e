"""Compare the numba loop kernels with the vectorized numpy fallbacks.

Times each dense kernel at a few sizes, then an end-to-end Hilbert sweep under
both backends (each in a fresh interpreter, since the backend is fixed at
import time).

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 50,100,200 --repeat 20
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dsmreg import kernels, problems
from dsmreg._jit import JIT_ENABLED

SWEEP = """
import time
from dsmreg import bench
cfg = bench.ExperimentConfig(n_list=list(range(10, 101, 10)), seeds=list(range(5)),
                             methods=["dsm", "dsm-q1", "dsm-dopri", "vr-i", "vr-n"])
t0 = time.perf_counter()
bench.run_experiment(cfg)
print(time.perf_counter() - t0)
"""


def spd(n, seed=0):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    return B @ B.T + n * np.eye(n)


def best_of(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases(n):
    M = spd(n)
    L, _ = kernels.cholesky_factor_numpy(M)
    b = np.ones(n)
    H = problems.hilbert(n)
    seed = np.uint64(12345)
    u = kernels.splitmix64_uniform_numpy(seed, 0, 2 * n * n)
    return {
        "cholesky_factor": (lambda k: k.cholesky_factor_loops(M), lambda k: k.cholesky_factor_numpy(M)),
        "cholesky_solve": (lambda k: k.cholesky_solve_loops(L, b), lambda k: k.cholesky_solve_numpy(L, b)),
        "power_iteration": (
            lambda k: k.power_iteration_loops(H, 1e-10, 10_000),
            lambda k: k.power_iteration_numpy(H, 1e-10, 10_000),
        ),
        "inv_hilbert": (lambda k: k.inv_hilbert_loops(n), lambda k: k.inv_hilbert_numpy(n)),
        "splitmix64": (
            lambda k: k.splitmix64_uniform_loops(seed, 0, 2 * n * n),
            lambda k: k.splitmix64_uniform_numpy(seed, 0, 2 * n * n),
        ),
        "box_muller": (lambda k: k.box_muller_loops(u, 2 * n * n), lambda k: k.box_muller_numpy(u, 2 * n * n)),
    }


def sweep_seconds(disable_jit):
    env = dict(os.environ)
    if disable_jit:
        env["DSMREG_DISABLE_JIT"] = "1"
    else:
        env.pop("DSMREG_DISABLE_JIT", None)
    out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="50,100,200")
    p.add_argument("--repeat", type=int, default=10)
    p.add_argument("--no-sweep", action="store_true", help="skip the end-to-end comparison")
    args = p.parse_args(argv)
    if not JIT_ENABLED:
        print("numba unavailable or disabled: the loop kernels run as plain Python", file=sys.stderr)

    print(f"{'kernel':16s} {'n':>5s} {'loops [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, (loops, vec) in kernel_cases(n).items():
            t_loop = best_of(lambda: loops(kernels), args.repeat)
            t_vec = best_of(lambda: vec(kernels), args.repeat)
            print(f"{name:16s} {n:5d} {1e3 * t_loop:11.3f} {1e3 * t_vec:11.3f} {t_vec / t_loop:8.2f}")

    if not args.no_sweep:
        jit = sweep_seconds(disable_jit=False)
        plain = sweep_seconds(disable_jit=True)
        print(f"\nHilbert sweep, 5 methods x 10 sizes x 5 seeds: numba {jit:.2f} s, numpy {plain:.2f} s "
              f"({plain / jit:.1f}x)")  # fmt: skip


if __name__ == "__main__":
    main()
