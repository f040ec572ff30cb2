"""Kinetic potentials: the dual description of energy trajectories.

fbar(s) is the minimum mean potential shape at fixed mean kinetic energy s.
It is linked to F(v) by a Legendre-type transform with sign conventions
chosen so that F(v) = min_s {s + v fbar(s)}.  The K function of a shape,
K(x) = fbar^{-1}(f(x)), is the object the functional inversion iterates on;
concavity of F turns its evaluation into the one-dimensional maximization
K(x) = max_v {F(v) - v f(x)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (BelowCritical, DomainTooSmall, KineticRangeExceeded,
                     MaximizerAtBoundary, MinimizerAtBoundary, NoBoundState,
                     NonMonotone, OutOfRange, UnsupportedShape)
from .eigensolve import SolverConfig
from .shapes import AnalyticShape
from .trajectory import EnergyTrajectory, pure_power_energy

__all__ = [
    "KineticPotential", "KFunction", "default_v_grid", "trajectory_to_kinetic",
    "kinetic_to_trajectory", "p_number", "k_function_closed", "k_via_max",
    "envelope_trajectory", "fit_power_with_offset",
]


def default_v_grid(v_lo: float = 1e-2, v_hi: float = 1e6,
                   per_decade: int = 200) -> np.ndarray:
    decades = math.log10(v_hi / v_lo)
    n = int(round(per_decade * decades)) + 1
    return np.geomspace(v_lo, v_hi, n)


def fit_power_with_offset(s: np.ndarray, f: np.ndarray):
    """Fit f = L + c*s^mu through three samples (geometric s preferred).

    Returns (L, c, mu).  Solved by bisection on mu; raises ValueError when
    the samples do not bracket a power-law exponent.
    """
    s1, s2, s3 = float(s[0]), float(s[1]), float(s[2])
    f1, f2, f3 = float(f[0]), float(f[1]), float(f[2])
    target = (f1 - f2) / (f2 - f3)

    def ratio(mu):
        return (s1 ** mu - s2 ** mu) / (s2 ** mu - s3 ** mu)

    lo, hi = None, None
    grid = np.concatenate((-np.geomspace(12.0, 1e-4, 120), np.geomspace(1e-4, 12.0, 120)))
    prev_mu, prev_val = None, None
    for mu in grid:
        try:
            val = ratio(mu) - target
        except (OverflowError, ZeroDivisionError):
            prev_mu, prev_val = None, None
            continue
        if not math.isfinite(val):
            prev_mu, prev_val = None, None
            continue
        if prev_val is not None and val * prev_val <= 0.0:
            lo, hi = prev_mu, mu
            break
        prev_mu, prev_val = mu, val
    if lo is None:
        raise ValueError("no power-law exponent fits the samples")
    from scipy.optimize import brentq
    mu = brentq(lambda m: ratio(m) - target, lo, hi, xtol=1e-14, rtol=8.9e-16)
    c = (f1 - f2) / (s1 ** mu - s2 ** mu)
    L = f1 - c * s1 ** mu
    return L, c, mu


class KineticPotential:
    """Sampled curve {(s_i, fbar_i)} with monotone interpolation and
    power-law-with-offset extension beyond the sampled s range."""

    def __init__(self, s: np.ndarray, fbar: np.ndarray, closed_form: str = "none"):
        s = np.asarray(s, dtype=float)
        fbar = np.asarray(fbar, dtype=float)
        if np.any(np.diff(s) <= 0):
            raise NonMonotone("kinetic-energy samples must strictly increase")
        if np.any(np.diff(fbar) >= 0):
            raise NonMonotone("mean-potential samples must strictly decrease")
        scale = max(1.0, float(np.max(np.abs(fbar))))
        slopes = np.diff(fbar) / np.diff(s)
        if np.any(np.diff(slopes) < -1e-8 * max(1.0, float(np.max(np.abs(slopes))))):
            raise NonMonotone("kinetic potential samples are not convex")
        self.s = s
        self.fbar = fbar
        self.closed_form = closed_form
        self._interp = PchipInterpolator(np.log(s), fbar, extrapolate=False)
        self._scale = scale
        self._ext_lo = None
        self._ext_hi = None

    def _extension(self, high: bool):
        cached = self._ext_hi if high else self._ext_lo
        if cached is not None:
            return cached
        s = self.s
        anchor = s[-1] if high else s[0]
        # Geometric triple spanning roughly the last (first) decade of samples.
        span = min(10.0, (s[-1] / s[0]) ** 0.5)
        r = span ** 0.5
        pts = np.array([anchor / r / r, anchor / r, anchor]) if high else \
            np.array([anchor, anchor * r, anchor * r * r])
        vals = self._interp(np.log(pts))
        try:
            fit = fit_power_with_offset(pts, vals)
        except ValueError:
            # Fall back to log-linear continuation of the edge slope.
            fit = None
        if high:
            self._ext_hi = fit
        else:
            self._ext_lo = fit
        return fit

    def _eval_extension(self, s_query: float, high: bool) -> float:
        fit = self._extension(high)
        if fit is None:
            edge = -1 if high else 0
            slope = self._interp.derivative()(math.log(self.s[edge]))
            return float(self.fbar[edge] + slope * (math.log(s_query) - math.log(self.s[edge])))
        L, c, mu = fit
        return L + c * s_query ** mu

    def evaluate(self, s_query: float) -> float:
        if s_query <= 0:
            raise KineticRangeExceeded("kinetic energy must be positive")
        if s_query < self.s[0] * 1e-10 or s_query > self.s[-1] * 1e10:
            raise KineticRangeExceeded(
                f"s = {s_query:g} far outside sampled range "
                f"[{self.s[0]:g}, {self.s[-1]:g}]")
        if s_query < self.s[0]:
            return self._eval_extension(s_query, high=False)
        if s_query > self.s[-1]:
            return self._eval_extension(s_query, high=True)
        return float(self._interp(math.log(s_query)))

    def __call__(self, s_query):
        if np.isscalar(s_query):
            return self.evaluate(float(s_query))
        return np.array([self.evaluate(float(s)) for s in np.asarray(s_query)])

    def affine_scaled(self, a: float, b: float, t: float) -> "KineticPotential":
        """Kinetic potential of a + b f(x/t) given this one for f."""
        if b <= 0 or t <= 0:
            raise ValueError("b and t must be positive")
        s_new = self.s / (t * t)
        return KineticPotential(s_new, a + b * self.fbar)


def trajectory_to_kinetic(traj: EnergyTrajectory, v_grid: np.ndarray | None = None) -> KineticPotential:
    """Sample (s, fbar) = (F - vF', F') along a log-spaced coupling grid."""
    if v_grid is None:
        v_grid = default_v_grid()
    v_grid = np.asarray(v_grid, dtype=float)
    s_list: list[float] = []
    f_list: list[float] = []
    for v in v_grid:
        # Couplings the trajectory cannot evaluate (below critical, outside
        # an imported table, or beyond the solver's reach) are skipped.
        try:
            fp = traj.Fprime(v)
            fv = traj.F(v)
        except (BelowCritical, OutOfRange, DomainTooSmall, NoBoundState):
            continue
        s_list.append(fv - v * fp)
        f_list.append(fp)
    if len(s_list) < 8:
        raise NonMonotone("too few feasible couplings to sample the kinetic curve")
    s_vals = np.array(s_list)
    f_vals = np.array(f_list)
    if np.any(np.diff(s_vals) <= 0):
        raise NonMonotone("computed kinetic term fails strict increase "
                          "(derivative noise in F')")
    return KineticPotential(s_vals, f_vals)


def kinetic_to_trajectory(kin: KineticPotential, v: float) -> float:
    """F(v) = min_s {s + v fbar(s)} over the sampled curve."""
    if v <= 0:
        raise ValueError("coupling v must be positive")
    lo, hi = math.log(kin.s[0]), math.log(kin.s[-1])

    def phi(u):
        su = math.exp(u)
        return su + v * kin.evaluate(su)

    u_best, f_best = _golden_min(phi, lo, hi, abs_tol=1e-12)
    if u_best - lo < 1e-6 or hi - u_best < 1e-6:
        raise MinimizerAtBoundary(
            "minimizing kinetic energy touches the sampled range edge; widen the v grid")
    return f_best


def _golden_min(func, lo, hi, abs_tol=1e-12, coarse_tol=1e-5, polish=12):
    """Golden-section minimization on [lo, hi] with parabolic polish.

    Tolerances are absolute in the search variable (callers pass log-scaled
    variables, so this is a relative tolerance on the underlying quantity).
    Robust to func returning +inf inside the interval.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    while b - a > coarse_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = func(d)
    if fc <= fd:
        x0, x1, x2 = a, c, d
        f1 = fc
    else:
        x0, x1, x2 = c, d, b
        f1 = fd
    f0, f2 = func(x0), func(x2)
    # Successive parabolic interpolation through the bracketing triple.
    for _ in range(polish):
        denom = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0)
        if denom == 0 or not math.isfinite(denom):
            break
        x_new = x1 - 0.5 * ((x1 - x0) ** 2 * (f1 - f2)
                            - (x1 - x2) ** 2 * (f1 - f0)) / denom
        if not (x0 < x_new < x2) or not math.isfinite(x_new):
            break
        f_new = func(x_new)
        pts = sorted([(x0, f0), (x1, f1), (x2, f2), (x_new, f_new)])
        k = min(range(4), key=lambda i: pts[i][1])
        k = min(max(k, 1), 2)
        (x0, f0), (x1, f1), (x2, f2) = pts[k - 1], pts[k], pts[k + 1]
        if x2 - x0 < abs_tol:
            break
    return x1, f1


def p_number(q: float, energy: float) -> float:
    """Scale-invariant constant of the pure-power spectrum (ground level)."""
    if q == 0:
        raise ValueError("q must be nonzero")
    return (abs(energy) ** ((2.0 + q) / (2.0 * q))
            * (2.0 / (2.0 + q)) ** (1.0 / q)
            * (abs(q) / (2.0 + q)) ** 0.5)


@dataclass(frozen=True)
class KFunction:
    """K(x) = fbar^{-1}(f(x)); strictly decreasing, divergent at x -> 0+."""

    kind: str  # "pure_power" | "sech_squared" | "numeric"
    func: Callable[[float], float]

    def __call__(self, x):
        if np.isscalar(x):
            return self.func(float(x))
        return np.array([self.func(float(xx)) for xx in np.asarray(x)])

    def scaled(self, t: float) -> "KFunction":
        """K function of f(x/t): multiplies by 1/t^2 at x/t."""
        return KFunction(self.kind, lambda x: self.func(x / t) / (t * t))


def k_function_closed(shape: AnalyticShape, cfg: SolverConfig = SolverConfig()) -> KFunction:
    """Closed-form K functions: (P/x)^2 for (shifted) pure powers, and
    sinh^{-2}(2x) for the sech-squared well.  Shift and multiplier of a
    pure power leave K unchanged."""
    if not isinstance(shape, AnalyticShape):
        raise UnsupportedShape("closed K functions exist only for analytic shapes")
    if shape.kind == "sech_squared":
        return KFunction("sech_squared", lambda x: 1.0 / math.sinh(2.0 * x) ** 2)
    if shape.kind in ("harmonic", "shifted_power"):
        q = 2.0 if shape.kind == "harmonic" else shape.power
        P = p_number(q, pure_power_energy(q, cfg))
        return KFunction("pure_power", lambda x: (P / x) ** 2)
    raise UnsupportedShape(f"no closed K function for {shape.kind!r}")


def k_via_max(traj: EnergyTrajectory, f_value: float,
              v_bracket: tuple[float, float] = (1e-3, 1e7),
              growth: float = 10.0, max_expansions: int = 6,
              rel_tol: float = 1e-10, return_argmax: bool = False):
    """K at the point where the shape equals f_value:
    max_v {F(v) - v*f_value}, concave in v hence unimodal.

    The bracket is expanded geometrically when the maximizer touches an
    edge; couplings below the solver-feasible range act as a hard edge.
    """
    v_lo, v_hi = v_bracket
    if not 0 < v_lo < v_hi:
        raise ValueError("invalid coupling bracket")
    v_lo = max(v_lo, traj.v_min * (1.0 + 1e-9) + 1e-300)
    feas_floor = [0.0]

    def neg(u):
        v = math.exp(u)
        if v <= feas_floor[0]:
            return math.inf
        try:
            return -(traj.F(v) - v * f_value)
        except (DomainTooSmall, NoBoundState, BelowCritical):
            feas_floor[0] = max(feas_floor[0], v)
            return math.inf

    for _ in range(max_expansions + 1):
        lo_u, hi_u = math.log(v_lo), math.log(v_hi)
        u_best, f_best = _golden_min(neg, lo_u, hi_u, abs_tol=rel_tol)
        if not math.isfinite(f_best):
            raise MaximizerAtBoundary("no feasible coupling in the bracket")
        at_lo = u_best - lo_u < 1e-4
        at_hi = hi_u - u_best < 1e-4
        if at_lo and v_lo > feas_floor[0] * (1.0 + 1e-12) and v_lo > traj.v_min * (1.0 + 1e-6) + 1e-300:
            v_lo = max(v_lo / growth, feas_floor[0] if feas_floor[0] > 0 else 0.0,
                       traj.v_min * (1.0 + 1e-9))
            if v_lo <= 0:
                v_lo = math.exp(lo_u) / growth
            continue
        if at_hi:
            v_hi *= growth
            continue
        if at_lo:
            raise MaximizerAtBoundary(
                "maximizer pinned at the lower feasibility edge of the coupling range")
        if 0.0 < feas_floor[0] and math.exp(u_best) <= feas_floor[0] * 1.1:
            # The search stalled against the infeasible-coupling wall; the
            # value there is a constrained maximum, not the true one.
            raise MaximizerAtBoundary(
                "maximizer pinned at the lower feasibility edge of the coupling range")
        if return_argmax:
            return -f_best, math.exp(u_best)
        return -f_best
    raise MaximizerAtBoundary("bracket expansion cap reached")


def envelope_trajectory(seed_kin: KineticPotential, g) -> Callable[[float], float]:
    """Trajectory evaluator of the envelope approximation F(v) =
    min_s {s + v g(fbar_seed(s))} for a monotone transformation g.

    g may be a callable or an (ordered values, transformed values) pair of
    sample arrays, interpolated monotonically.
    """
    if callable(g):
        g_func = g
    else:
        u, w = np.asarray(g[0], dtype=float), np.asarray(g[1], dtype=float)
        order = np.argsort(u)
        interp = PchipInterpolator(u[order], w[order], extrapolate=True)
        g_func = lambda val: float(interp(val))

    def evaluator(v: float) -> float:
        if v <= 0:
            raise ValueError("coupling v must be positive")
        lo, hi = math.log(seed_kin.s[0]), math.log(seed_kin.s[-1])

        def phi(loga):
            su = math.exp(loga)
            return su + v * g_func(seed_kin.evaluate(su))

        u_best, f_best = _golden_min(phi, lo, hi, abs_tol=1e-12)
        if u_best - lo < 1e-6 or hi - u_best < 1e-6:
            raise MinimizerAtBoundary("envelope minimizer at sampled range edge")
        return f_best

    return evaluator
