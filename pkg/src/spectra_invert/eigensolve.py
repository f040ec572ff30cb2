"""Forward eigensolver: ground state of -psi'' + v f(x) psi = E psi.

The potential shape is symmetric, so only [0, L] is integrated, with the
even boundary condition psi'(0) = 0 and a decaying condition at L.  The
energy is located by bisection on the node count of the outward Numerov
solution (the ground state is the energy at which the first node reaches
the boundary), which is monotone and therefore bracket-safe.  The
wavefunction is assembled by matching outward and inward sweeps at the
classical turning point, avoiding the exponentially growing tail of the
one-sided solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import kernels
from .errors import DomainTooSmall, NoBoundState
from .shapes import PotentialShape

__all__ = ["SolverConfig", "EigenResult", "ground_energy", "ground_state",
           "mean_potential", "concentration"]

# exp(-_BARRIER) is the targeted wavefunction suppression at the boundary;
# ln(1e6) with safety margin.
_BARRIER = 16.0
_BARRIER_MIN = 13.8


@dataclass(frozen=True)
class SolverConfig:
    """Numerical parameters of the forward solver.

    domain_half_width: fixed L, or None for automatic sizing.
    max_half_width: cap on the automatic domain expansion.
    """

    domain_half_width: float | None = None
    grid_points: int = 2000
    energy_tolerance: float = 1e-9
    max_bisections: int = 128
    max_half_width: float = 50.0
    dx_cap: float = 2e-3
    decay_threshold: float = 1e-6


@dataclass(frozen=True)
class EigenResult:
    energy: float
    x_grid: np.ndarray
    psi: np.ndarray
    node_count: int
    turning_point: float

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])


def _make_grid(shape: PotentialShape, v: float, half_width: float, n_points: int,
               dx_cap: float):
    dx = min(half_width / (n_points - 1), dx_cap)
    n = int(math.ceil(half_width / dx)) + 1
    x = np.arange(n) * dx
    return x, v * shape.evaluate(x), dx


def _bisect_energy(vfx: np.ndarray, dx: float, tolerance: float, max_iter: int) -> float:
    """Ground-state energy on this fixed grid, Dirichlet-like at the boundary."""
    e_lo = float(np.min(vfx))
    e_hi = float(np.max(vfx))
    scale = max(1.0, abs(e_lo), abs(e_hi))
    if e_hi - e_lo <= 1e-14 * scale:
        raise NoBoundState("potential is numerically flat on the domain")
    nodes, _, _ = kernels.outward_sweep(vfx, e_hi - 1e-12 * scale, dx, 1)
    if nodes < 1:
        raise NoBoundState("no level below the potential's limit for this coupling")
    width_target = max(min(tolerance, 1e-13 * scale), 4e-16 * scale)
    for _ in range(max_iter):
        e_mid = 0.5 * (e_lo + e_hi)
        nodes, _, _ = kernels.outward_sweep(vfx, e_mid, dx, 1)
        if nodes >= 1:
            e_hi = e_mid
        else:
            e_lo = e_mid
        if e_hi - e_lo <= width_target:
            break
    return 0.5 * (e_lo + e_hi)


def _barrier_integral(vfx: np.ndarray, energy: float, dx: float) -> np.ndarray:
    """Cumulative WKB suppression exponent integral of sqrt(v f - E)_+ ."""
    kappa = np.sqrt(np.clip(vfx - energy, 0.0, None))
    out = np.zeros_like(kappa)
    np.cumsum(0.5 * (kappa[1:] + kappa[:-1]) * dx, out=out[1:])
    return out


def _size_domain(shape: PotentialShape, v: float, cfg: SolverConfig) -> float:
    """Pick L so the boundary sits deep in the classically forbidden region."""
    half_width = 2.0
    coarse = min(cfg.grid_points, 800)
    for _ in range(3):
        for _ in range(32):
            x, vfx, dx = _make_grid(shape, v, half_width, coarse, cfg.dx_cap)
            try:
                energy = _bisect_energy(vfx, dx, 1e-4 * max(1.0, abs(vfx[0])), 80)
            except NoBoundState:
                if half_width >= cfg.max_half_width:
                    raise
                half_width = min(half_width * 2.0, cfg.max_half_width)
                continue
            barrier = _barrier_integral(vfx, energy, dx)
            if barrier[-1] >= _BARRIER:
                # Trim: smallest x at which the suppression target is met.
                idx = int(np.searchsorted(barrier, _BARRIER))
                half_width = float(x[min(idx + 2, x.size - 1)])
                break
            if half_width >= cfg.max_half_width:
                raise DomainTooSmall(
                    f"wavefunction not decayed at L={half_width:g} "
                    f"(suppression exponent {barrier[-1]:.2f} < {_BARRIER_MIN:g})")
            # Expansion guided by the local decay rate at the boundary.
            kap2 = vfx[-1] - energy
            if kap2 > 0:
                turn = float(x[np.argmax(vfx >= energy)])
                guess = turn + 12.0 / math.sqrt(kap2)
                half_width = min(max(guess, half_width * 1.5), cfg.max_half_width)
            else:
                half_width = min(half_width * 2.0, cfg.max_half_width)
        else:
            raise DomainTooSmall("domain sizing failed to converge")
        coarse = min(cfg.grid_points, 2000)
    return half_width


def _resolve_domain(shape: PotentialShape, v: float, cfg: SolverConfig):
    if cfg.domain_half_width is not None:
        x, vfx, dx = _make_grid(shape, v, cfg.domain_half_width, cfg.grid_points,
                                cfg.dx_cap)
    else:
        half_width = _size_domain(shape, v, cfg)
        x, vfx, dx = _make_grid(shape, v, half_width, cfg.grid_points, cfg.dx_cap)
    return x, vfx, dx


def _check_decay(vfx: np.ndarray, energy: float, dx: float, cfg: SolverConfig):
    barrier = _barrier_integral(vfx, energy, dx)
    if barrier[-1] < -math.log(cfg.decay_threshold):
        raise DomainTooSmall(
            f"wavefunction decay at the boundary is only exp(-{barrier[-1]:.2f})")


def ground_energy(shape: PotentialShape, v: float, cfg: SolverConfig = SolverConfig()) -> float:
    """Lowest (even) eigenvalue of -d^2/dx^2 + v*shape(x)."""
    if v <= 0:
        raise ValueError("coupling v must be positive")
    x, vfx, dx = _resolve_domain(shape, v, cfg)
    energy = _bisect_energy(vfx, dx, cfg.energy_tolerance, cfg.max_bisections)
    _check_decay(vfx, energy, dx, cfg)
    return energy


def ground_state(shape: PotentialShape, v: float, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Ground-state energy plus the normalized wavefunction on [0, L]."""
    if v <= 0:
        raise ValueError("coupling v must be positive")
    x, vfx, dx = _resolve_domain(shape, v, cfg)
    energy = _bisect_energy(vfx, dx, cfg.energy_tolerance, cfg.max_bisections)
    _check_decay(vfx, energy, dx, cfg)

    n = vfx.size
    above = np.nonzero(vfx > energy)[0]
    match = int(above[0]) if above.size else n - 3
    match = min(max(match, 2), n - 3)

    psi_out = kernels.outward_array(vfx, energy, dx, match)
    tail_decay = math.exp(-math.sqrt(max(vfx[-1] - energy, 0.0)) * dx)
    psi_in = kernels.inward_array(vfx, energy, dx, match, tail_decay)
    psi = np.empty(n)
    psi[:match + 1] = psi_out
    psi[match:] = psi_in[match:] * (psi_out[match] / psi_in[match])

    norm_half = simpson(psi * psi, x=x)
    psi /= math.sqrt(2.0 * norm_half)

    peak = float(np.max(np.abs(psi)))
    significant = np.abs(psi) > 1e-12 * peak
    signs = np.sign(psi[significant])
    node_count = int(np.sum(signs[1:] * signs[:-1] < 0))

    turning_point = _turning_point(shape, v, energy, x, vfx)
    return EigenResult(energy=energy, x_grid=x, psi=psi, node_count=node_count,
                       turning_point=turning_point)


def _turning_point(shape, v, energy, x, vfx) -> float:
    above = np.nonzero(vfx > energy)[0]
    if above.size == 0 or above[0] == 0:
        return 0.0
    i = int(above[0])
    lo, hi = x[i - 1], x[i]
    func = lambda xx: v * shape(xx) - energy
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return float(lo)
    if f_lo * f_hi > 0:
        return float(hi)
    return float(brentq(func, lo, hi, xtol=1e-13, rtol=8.9e-16))


def mean_potential(res: EigenResult, shape: PotentialShape) -> float:
    """<f> over the normalized ground state; equals dF/dv (Hellmann-Feynman)."""
    fs = shape.evaluate(res.x_grid)
    return 2.0 * float(simpson(res.psi * res.psi * fs, x=res.x_grid))


def concentration(res: EigenResult, a: float) -> float:
    """Probability mass q = integral of psi^2 over [-a, a]."""
    x = res.x_grid
    if a <= 0:
        raise ValueError("a must be positive")
    if a >= x[-1]:
        a = x[-1]
    idx = int(np.searchsorted(x, a, side="right")) - 1
    idx = max(idx, 1)
    q = 2.0 * float(simpson(res.psi[:idx + 1] ** 2, x=x[:idx + 1]))
    if a > x[idx]:
        q += 2.0 * (a - x[idx]) * float(res.psi[idx] ** 2)
    return min(q, 1.0)
