"""Benchmark the compiled Numerov kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
The fallback is selected at import time by SPECTRA_INVERT_PURE_NUMPY=1; this
script times both implementations directly, so no environment toggling is
needed.
"""

import time

import numpy as np

from spectra_invert import kernels
from spectra_invert.eigensolve import ground_energy
from spectra_invert.shapes import sech_squared


def time_callable(func, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = 40_000
    x = np.linspace(0.0, 20.0, n)
    vfx = 5.0 * (x * x - 1.0)
    dx = x[1] - x[0]

    if kernels.USING_NUMBA:
        kernels.outward_sweep(vfx, -1.0, dx, 1)  # trigger compilation

    pairs = [
        ("outward_sweep", lambda: kernels.outward_sweep(vfx, -1.0, dx, 1),
         lambda: kernels.outward_sweep_py(vfx, -1.0, dx, 1)),
        ("outward_array", lambda: kernels.outward_array(vfx, -1.0, dx, n - 2),
         lambda: kernels.outward_array_py(vfx, -1.0, dx, n - 2)),
        ("inward_array", lambda: kernels.inward_array(vfx, -1.0, dx, 10, 0.9),
         lambda: kernels.inward_array_py(vfx, -1.0, dx, 10, 0.9)),
    ]
    print(f"grid points: {n}, numba active: {kernels.USING_NUMBA}")
    for name, fast, slow in pairs:
        t_fast = time_callable(fast)
        t_slow = time_callable(slow, repeats=2)
        print(f"{name:15s} compiled {t_fast * 1e3:8.2f} ms   "
              f"pure {t_slow * 1e3:8.2f} ms   speedup {t_slow / t_fast:6.1f}x")

    shape = sech_squared()
    t_solve = time_callable(lambda: ground_energy(shape, 7.3), repeats=3)
    print(f"full ground_energy solve: {t_solve * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
