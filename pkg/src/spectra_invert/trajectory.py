"""Energy trajectories F(v) and the large-coupling analysis built on them.

A trajectory is the ground-state energy of -d2/dx2 + v f(x) as a function of
the coupling v.  Analytic benchmark trajectories carry closed forms; numeric
trajectories call the eigensolver with memoization.  On top of evaluation
this module provides:

* invert_R      -- invert R(v) = F(v)/v (monotone decreasing),
* estimate_f0   -- the limit F(v)/v -> f(0) by Richardson-style extrapolation,
* detect_flat   -- flat-patch half-width from boundedness of the kinetic term,
* fit_head      -- shifted-power model f(0) + A x^q near x = 0.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .eigensolve import (SolverConfig, _size_domain, ground_energy,
                         ground_state, mean_potential)
from .errors import (BelowCritical, DegenerateFit, DomainTooSmall, NoBoundState,
                     NonConvergent, OutOfRange)
from .shapes import AnalyticShape, PotentialShape, exponential, shifted_power

__all__ = [
    "EnergyTrajectory", "SechSquaredTrajectory", "ShiftedPowerTrajectory",
    "HarmonicTrajectory", "NumericTrajectory", "ImportedTrajectory",
    "HeadModel", "invert_R", "estimate_f0", "detect_flat", "fit_head",
    "pure_power_energy", "export_trajectory_csv", "import_trajectory_csv",
    "analytic_trajectory",
]


@dataclass(frozen=True)
class HeadModel:
    """Model for f(x) on [0, b]: a flat patch, or f0 + A x^q."""

    kind: str  # "flat" | "power"
    f0: float
    b: float
    A: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "power"):
            raise ValueError(f"unknown head kind {self.kind!r}")
        if self.b <= 0:
            raise ValueError("b must be positive")
        if self.kind == "power" and (self.A <= 0 or self.q <= 0):
            raise ValueError("power head requires A > 0 and q > 0")

    def value(self, x: float) -> float:
        if self.kind == "flat":
            return self.f0
        return self.f0 + self.A * abs(x) ** self.q


class EnergyTrajectory:
    """Base class: F(v), F'(v), R(v) = F(v)/v for v > v_min."""

    v_min: float = 0.0

    def _check(self, v: float) -> None:
        if v <= self.v_min:
            raise BelowCritical(f"coupling {v:g} not above critical value {self.v_min:g}")

    def F(self, v: float) -> float:
        raise NotImplementedError

    def Fprime(self, v: float) -> float:
        raise NotImplementedError

    def R(self, v: float) -> float:
        self._check(v)
        return self.F(v) / v

    def kinetic_term(self, v: float) -> float:
        """Mean kinetic energy s(v) = F(v) - v F'(v) >= 0."""
        return self.F(v) - v * self.Fprime(v)


class SechSquaredTrajectory(EnergyTrajectory):
    """Closed form for f(x) = -sech^2(x); level index matters only for
    figure-data emission, inversion always uses the ground level."""

    def __init__(self, level: int = 0):
        if level < 0:
            raise ValueError("level must be nonnegative")
        self.level = level
        self.v_min = float(level * (level + 1))

    def F(self, v: float) -> float:
        self._check(v)
        return -(math.sqrt(v + 0.25) - (self.level + 0.5)) ** 2

    def Fprime(self, v: float) -> float:
        self._check(v)
        root = math.sqrt(v + 0.25)
        return -(root - (self.level + 0.5)) / root


class ShiftedPowerTrajectory(EnergyTrajectory):
    """F(v) = f0*v + E_q*(v*A)^(2/(2+q)) for f(x) = f0 + A|x|^q."""

    def __init__(self, f0: float, A: float, q: float, E_q: float):
        if A <= 0 or q <= 0:
            raise ValueError("A and q must be positive")
        self.f0, self.A, self.q, self.E_q = f0, A, q, E_q
        self.eta = 2.0 / (2.0 + q)

    def F(self, v: float) -> float:
        self._check(v)
        return self.f0 * v + self.E_q * (v * self.A) ** self.eta

    def Fprime(self, v: float) -> float:
        self._check(v)
        return self.f0 + self.eta * self.E_q * self.A ** self.eta * v ** (self.eta - 1.0)


class HarmonicTrajectory(EnergyTrajectory):
    """F(v) = sqrt(v) for f(x) = x^2."""

    def F(self, v: float) -> float:
        self._check(v)
        return math.sqrt(v)

    def Fprime(self, v: float) -> float:
        self._check(v)
        return 0.5 / math.sqrt(v)


class NumericTrajectory(EnergyTrajectory):
    """Eigensolver-backed trajectory with a thread-safe memo table."""

    def __init__(self, shape: PotentialShape, cfg: SolverConfig = SolverConfig()):
        self.shape = shape
        self.cfg = cfg
        self._F_cache: dict[float, float] = {}
        self._Fp_cache: dict[float, float] = {}
        self._width_cache: dict[int, float] = {}
        self._lock = threading.Lock()

    def _sized_cfg(self, v: float, fresh: bool = False) -> SolverConfig:
        """Config with a memoized domain half-width for v's half-decade.

        Domain sizing costs several coarse solves; nearby couplings need
        nearly the same width, so reuse the largest one seen in the bucket."""
        if self.cfg.domain_half_width is not None:
            return self.cfg
        key = int(math.floor(2.0 * math.log10(v)))
        with self._lock:
            width = self._width_cache.get(key)
        if width is None or fresh:
            width = _size_domain(self.shape, v, self.cfg)
            with self._lock:
                width = max(width, self._width_cache.get(key, 0.0))
                self._width_cache[key] = width
        return replace(self.cfg, domain_half_width=width)

    def _solve(self, v: float, full_state: bool):
        cfg = self._sized_cfg(v)
        solver = ground_state if full_state else ground_energy
        try:
            return solver(self.shape, v, cfg)
        except DomainTooSmall:
            if cfg.domain_half_width == self.cfg.domain_half_width:
                raise
            # Bucketed width too small for this coupling; resize and retry.
            return solver(self.shape, v, self._sized_cfg(v, fresh=True))

    def F(self, v: float) -> float:
        self._check(v)
        with self._lock:
            hit = self._F_cache.get(v)
        if hit is not None:
            return hit
        val = self._solve(v, full_state=False)
        with self._lock:
            self._F_cache[v] = val
        return val

    def Fprime(self, v: float) -> float:
        self._check(v)
        with self._lock:
            hit = self._Fp_cache.get(v)
        if hit is not None:
            return hit
        res = self._solve(v, full_state=True)
        val = mean_potential(res, self.shape)
        with self._lock:
            self._F_cache[v] = res.energy
            self._Fp_cache[v] = val
        return val

    def sampled(self):
        """Sorted copy of all (v, F) pairs evaluated so far."""
        with self._lock:
            items = sorted(self._F_cache.items())
        return np.array([p[0] for p in items]), np.array([p[1] for p in items])

    def lowest_feasible_v(self, v_start: float = 1.0, floor: float = 1e-8) -> float:
        """Smallest probed coupling the solver can handle within its domain cap."""
        v_good = None
        v = v_start
        while v > floor:
            try:
                self.F(v)
            except (DomainTooSmall, NoBoundState):
                break
            v_good = v
            v *= 0.5
        if v_good is None:
            raise DomainTooSmall(f"no feasible coupling at or below {v_start:g}")
        return v_good


class ImportedTrajectory(EnergyTrajectory):
    """Trajectory interpolated from tabulated (v, F[, F']) samples."""

    def __init__(self, v: np.ndarray, F: np.ndarray, Fprime: np.ndarray | None = None):
        v = np.asarray(v, dtype=float)
        F = np.asarray(F, dtype=float)
        if v.ndim != 1 or v.size < 4:
            raise ValueError("need at least four samples")
        if np.any(np.diff(v) <= 0):
            raise ValueError("v column must be strictly increasing")
        slopes = np.diff(F) / np.diff(v)
        scale = max(1.0, float(np.max(np.abs(slopes))))
        if np.any(np.diff(slopes) > 1e-8 * scale):
            raise ValueError("imported trajectory is not concave")
        ratios = F / v
        if np.any(np.diff(ratios) >= 0):
            raise ValueError("imported trajectory has non-decreasing R(v) = F(v)/v")
        self.v_min = float(v[0]) * (1.0 - 1e-12)
        self.v_max = float(v[-1])
        self._F = PchipInterpolator(v, F, extrapolate=False)
        if Fprime is not None:
            self._Fp = PchipInterpolator(v, np.asarray(Fprime, dtype=float),
                                         extrapolate=False)
        else:
            self._Fp = self._F.derivative()

    def _check(self, v: float) -> None:
        super()._check(v)
        if v > self.v_max * (1.0 + 1e-12):
            raise OutOfRange(f"coupling {v:g} beyond imported range {self.v_max:g}")

    def F(self, v: float) -> float:
        self._check(v)
        return float(self._F(min(v, self.v_max)))

    def Fprime(self, v: float) -> float:
        self._check(v)
        return float(self._Fp(min(v, self.v_max)))


# --- spec operation surface -------------------------------------------------

def eval_F(traj: EnergyTrajectory, v: float) -> float:
    return traj.F(v)


def eval_Fprime(traj: EnergyTrajectory, v: float) -> float:
    return traj.Fprime(v)


def invert_R(traj: EnergyTrajectory, target: float, v_lo: float = 0.25,
             v_hi: float = 4.0, v_cap: float = 1e10, rtol: float = 1e-9) -> float:
    """Solve R(v) = target; R is strictly decreasing, bracket grown geometrically."""
    v_lo = max(v_lo, traj.v_min * (1.0 + 1e-9) + 1e-300)
    v_hi = max(v_hi, v_lo * 4.0)

    def r(v):
        return traj.R(v)

    while r(v_hi) > target:
        if v_hi >= v_cap:
            raise OutOfRange(f"R stays above target {target:g} up to v = {v_cap:g}")
        v_hi = min(v_hi * 10.0, v_cap)
    # For finite wells the solver cannot reach arbitrarily small couplings
    # (too-shallow states outgrow the domain cap); raise the lower probe to
    # the feasible range first.
    while True:
        try:
            r(v_lo)
            break
        except (DomainTooSmall, NoBoundState, BelowCritical) as exc:
            v_lo *= 2.0
            if v_lo >= v_hi:
                raise OutOfRange(f"target {target:g} needs couplings below the "
                                 f"solver-feasible range") from exc
    while r(v_lo) <= target:
        nxt = v_lo / 10.0
        if nxt <= traj.v_min or nxt < 1e-12:
            raise OutOfRange(f"target {target:g} above the attainable range of R")
        try:
            if r(nxt) <= target:
                v_lo = nxt
                continue
        except (DomainTooSmall, NoBoundState, BelowCritical) as exc:
            raise OutOfRange(f"target {target:g} needs couplings below the "
                             f"solver-feasible range") from exc
        v_lo = nxt
        break

    t = brentq(lambda u: r(math.exp(u)) - target, math.log(v_lo), math.log(v_hi),
               xtol=1e-14, rtol=8.9e-16)
    v = math.exp(t)
    if abs(traj.R(v) - target) > max(rtol * abs(target), 1e-13):
        raise NonConvergent("R inversion residual above tolerance")
    return v


def _aitken(seq):
    out = []
    for j in range(len(seq) - 2):
        d1 = seq[j + 1] - seq[j]
        d2 = seq[j + 2] - seq[j + 1]
        den = d2 - d1
        if den == 0.0:
            out.append(seq[j + 2])
        else:
            out.append(seq[j + 2] - d2 * d2 / den)
    return out


def estimate_f0(traj: EnergyTrajectory, v1: float | None = None, levels: int = 7,
                tol: float = 1e-3) -> float:
    """lim F(v)/v via iterated Aitken extrapolation of R on a geometric v grid."""
    if v1 is None:
        v1 = max(1e3, 8.0 * max(traj.v_min, 1.0))
    samples = [traj.R(v1 * 2.0 ** j) for j in range(levels)]
    first = _aitken(samples)
    second = _aitken(first)
    est = second[-1] if second else first[-1]
    prev = second[-2] if len(second) >= 2 else first[-1]
    if not (math.isfinite(est) and math.isfinite(prev)) or abs(est - prev) > tol:
        raise NonConvergent("F(v)/v extrapolation did not settle")
    return est


def detect_flat(traj: EnergyTrajectory, probes: np.ndarray | None = None):
    """Flat-patch half-width b if the kinetic term s(v) looks bounded, else None.

    Boundedness test: s at the largest probe within 5% of s at half that value;
    then b = (pi/2) / sqrt(sup sampled s).
    """
    if probes is None:
        probes = 64.0 * 2.0 ** np.arange(7)
    probes = np.sort(np.asarray(probes, dtype=float))
    s_vals = [traj.kinetic_term(v) for v in probes]
    s_top = traj.kinetic_term(probes[-1])
    s_half = traj.kinetic_term(probes[-1] / 2.0)
    if abs(s_top - s_half) > 0.05 * abs(s_top):
        return None
    k_sup = max(s_vals)
    if k_sup <= 0:
        return None
    return (math.pi / 2.0) / math.sqrt(k_sup)


_PURE_POWER_CACHE: dict[float, float] = {}
_PURE_POWER_LOCK = threading.Lock()


def pure_power_energy(q: float, cfg: SolverConfig = SolverConfig()) -> float:
    """Bottom of the spectrum of -d2/dx2 + |x|^q, memoized."""
    key = round(q, 12)
    with _PURE_POWER_LOCK:
        hit = _PURE_POWER_CACHE.get(key)
    if hit is not None:
        return hit
    val = ground_energy(shifted_power(0.0, 1.0, q), 1.0, cfg)
    with _PURE_POWER_LOCK:
        _PURE_POWER_CACHE[key] = val
    return val


def fit_head(traj: EnergyTrajectory, v1: float = 1e4,
             cfg: SolverConfig = SolverConfig(), f0: float | None = None) -> HeadModel:
    """Shifted-power head f0 + A x^q on [0, b] fitted from F(v1), F(2 v1).

    The doubling pair determines the power through the scaling law
    G(v) = f0*v + E(q)(vA)^(2/(2+q)); b is the turning point of the fitted
    model at v1.
    """
    if f0 is None:
        f0 = estimate_f0(traj, v1=v1)
    d1 = traj.F(v1) - v1 * f0
    d2 = traj.F(2.0 * v1) - 2.0 * v1 * f0
    if d1 <= 0 or d2 <= 0:
        raise DegenerateFit("coupling-scaled energy excess is nonpositive")
    eta = math.log(d2 / d1) / math.log(2.0)
    if not 0.0 < eta < 1.0:
        raise DegenerateFit(f"scaling exponent {eta:g} outside (0, 1)")
    q = 2.0 / eta - 2.0
    E_q = pure_power_energy(q, cfg)
    A = (d1 / E_q) ** (1.0 / eta) / v1
    b = (d1 / (A * v1)) ** (1.0 / q)
    return HeadModel(kind="power", f0=f0, b=b, A=A, q=q)


# --- CSV interchange ---------------------------------------------------------

def export_trajectory_csv(traj: EnergyTrajectory, v_grid: np.ndarray, path) -> None:
    rows = ["v,F,Fprime"]
    for v in np.asarray(v_grid, dtype=float):
        rows.append(f"{v:.15g},{traj.F(v):.15g},{traj.Fprime(v):.15g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def import_trajectory_csv(path) -> ImportedTrajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if names is None or "v" not in names or "F" not in names:
        raise ValueError("trajectory CSV needs a header with at least v,F")
    fp = data["Fprime"] if "Fprime" in names else None
    return ImportedTrajectory(data["v"], data["F"], fp)


def analytic_trajectory(name: str, cfg: SolverConfig = SolverConfig()) -> EnergyTrajectory:
    """Named trajectories for the CLI: sech2, harmonic, exponential, power:q."""
    if name == "sech2":
        return SechSquaredTrajectory()
    if name == "harmonic":
        return HarmonicTrajectory()
    if name == "exponential":
        return NumericTrajectory(exponential(), cfg)
    if name.startswith("power:"):
        from fractions import Fraction
        q = float(Fraction(name.split(":", 1)[1]))
        return ShiftedPowerTrajectory(-1.0, 1.0, q, pure_power_energy(q, cfg))
    raise ValueError(f"unknown analytic trajectory {name!r}")
