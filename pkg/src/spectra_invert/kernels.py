"""Numerov integration kernels.

These inner loops dominate the runtime of every eigensolve.  They are
compiled with numba by default; setting the environment variable
``SPECTRA_INVERT_PURE_NUMPY=1`` selects the plain-Python implementations
instead (slower, but dependency-free and bit-compatible -- see
``benchmarks/bench_kernels.py``).

All kernels integrate psi'' = g(x) psi with g = v*f(x) - E on a uniform
grid, using the standard fourth-order Numerov three-term recurrence.
"""

import os

import numpy as np

# Low enough that a product of two just-under-threshold values (the node
# sign test) cannot overflow float64.
_RESCALE = 1e100


def _outward_sweep(vfx, energy, dx, count_from):
    """Numerov sweep from x=0 with even start (psi(0)=1, psi'(0)=0).

    Returns (node_count, psi_end, psi_prev_end).  node_count counts sign
    changes at grid indices >= count_from; psi is rescaled by 1/_RESCALE
    whenever it overflows the threshold, which preserves signs and nodes.
    """
    n = vfx.shape[0]
    c = dx * dx / 12.0
    psi_prev = 1.0
    g0 = vfx[0] - energy
    g1 = vfx[1] - energy
    psi = psi_prev * (1.0 + 5.0 * c * g0) / (1.0 - c * g1)
    nodes = 0
    if count_from <= 1 and psi * psi_prev < 0.0:
        nodes += 1
    gm = g0
    gi = g1
    for i in range(1, n - 1):
        gp = vfx[i + 1] - energy
        psi_next = (2.0 * psi * (1.0 + 5.0 * c * gi)
                    - psi_prev * (1.0 - c * gm)) / (1.0 - c * gp)
        if i + 1 >= count_from and psi_next * psi < 0.0:
            nodes += 1
        psi_prev = psi
        psi = psi_next
        gm = gi
        gi = gp
        if psi > _RESCALE or psi < -_RESCALE:
            psi *= 1.0 / _RESCALE
            psi_prev *= 1.0 / _RESCALE
    return nodes, psi, psi_prev


def _outward_array(vfx, energy, dx, stop):
    """Outward Numerov sweep storing psi[0..stop] (inclusive), even start."""
    c = dx * dx / 12.0
    psi = np.zeros(stop + 1)
    psi[0] = 1.0
    g0 = vfx[0] - energy
    g1 = vfx[1] - energy
    psi[1] = (1.0 + 5.0 * c * g0) / (1.0 - c * g1)
    for i in range(1, stop):
        gi = vfx[i] - energy
        gm = vfx[i - 1] - energy
        gp = vfx[i + 1] - energy
        psi[i + 1] = (2.0 * psi[i] * (1.0 + 5.0 * c * gi)
                      - psi[i - 1] * (1.0 - c * gm)) / (1.0 - c * gp)
    return psi


def _inward_array(vfx, energy, dx, stop, tail_decay):
    """Inward Numerov sweep storing psi[stop..n-1]; decaying start at x=L.

    tail_decay is exp(-kappa*dx) estimated at the boundary; the sweep is
    rescaled on overflow and the scale folded back before returning, so
    only the shape near ``stop`` is meaningful (it is renormalized by the
    caller at the matching index anyway).
    """
    n = vfx.shape[0]
    c = dx * dx / 12.0
    psi = np.zeros(n)
    psi[n - 1] = tail_decay
    psi[n - 2] = 1.0
    for i in range(n - 2, stop, -1):
        gi = vfx[i] - energy
        gm = vfx[i + 1] - energy
        gp = vfx[i - 1] - energy
        psi[i - 1] = (2.0 * psi[i] * (1.0 + 5.0 * c * gi)
                      - psi[i + 1] * (1.0 - c * gm)) / (1.0 - c * gp)
        if psi[i - 1] > _RESCALE or psi[i - 1] < -_RESCALE:
            psi[stop:] *= 1.0 / _RESCALE
    return psi


def _use_numba() -> bool:
    flag = os.environ.get("SPECTRA_INVERT_PURE_NUMPY", "").strip().lower()
    return flag not in ("1", "true", "yes")


# Pure-Python references are always importable for parity tests and benchmarks.
outward_sweep_py = _outward_sweep
outward_array_py = _outward_array
inward_array_py = _inward_array

USING_NUMBA = False
if _use_numba():
    try:
        from numba import njit

        outward_sweep = njit(cache=True, nogil=True)(_outward_sweep)
        outward_array = njit(cache=True, nogil=True)(_outward_array)
        inward_array = njit(cache=True, nogil=True)(_inward_array)
        USING_NUMBA = True
    except ImportError:
        outward_sweep = _outward_sweep
        outward_array = _outward_array
        inward_array = _inward_array
else:
    outward_sweep = _outward_sweep
    outward_array = _outward_array
    inward_array = _inward_array
