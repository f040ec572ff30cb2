"""Potential shapes f(x): symmetric, monotone nondecreasing on x >= 0, bounded below.

Only the half-line x >= 0 is ever evaluated; symmetry is implied.  Three
families are supported: analytic benchmark shapes, a head-model plus
linear-segment form built up by the constructive inversion, and tabulated
shapes produced by the functional inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "PotentialShape",
    "AnalyticShape",
    "HeadPlusSegments",
    "TabulatedShape",
    "sech_squared",
    "exponential",
    "shifted_power",
    "harmonic",
]


class PotentialShape:
    """Base class.  Subclasses implement ``evaluate`` on arrays of x >= 0."""

    #: True when f(x) -> 0 from below as x -> infinity (finite wells).
    bounded: bool = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        scalar = np.isscalar(x)
        out = self.evaluate(np.atleast_1d(np.asarray(x, dtype=float)))
        return float(out[0]) if scalar else out

    def value_at_zero(self) -> float:
        return float(self(0.0))

    def check_valid(self, x_max: float = 10.0, n: int = 257) -> None:
        """Assert finiteness and monotonicity on a sample grid."""
        xs = np.linspace(0.0, x_max, n)
        fs = self.evaluate(xs)
        if not np.all(np.isfinite(fs)):
            raise ValueError("potential shape evaluates to non-finite values")
        if np.any(np.diff(fs) < -1e-10 * max(1.0, float(np.max(np.abs(fs))))):
            raise ValueError("potential shape is not monotone nondecreasing on x >= 0")


@dataclass(frozen=True)
class AnalyticShape(PotentialShape):
    """Closed-form benchmark shapes.

    kind is one of {"sech_squared", "exponential", "shifted_power", "harmonic"};
    shifted_power evaluates shift + mult*|x|**power.
    """

    kind: str
    shift: float = 0.0
    mult: float = 1.0
    power: float = 2.0

    def __post_init__(self):
        if self.kind not in ("sech_squared", "exponential", "shifted_power", "harmonic"):
            raise ValueError(f"unknown analytic shape kind: {self.kind!r}")
        if self.kind == "shifted_power" and (self.mult <= 0 or self.power <= 0):
            raise ValueError("shifted_power requires mult > 0 and power > 0")
        if self.kind in ("sech_squared", "exponential"):
            object.__setattr__(self, "bounded", True)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "sech_squared":
            # sech^2 via exponentials; 1/cosh(x)**2 overflows for large x
            e = np.exp(-np.abs(x))
            return -(2.0 * e / (1.0 + e * e)) ** 2
        if self.kind == "exponential":
            return -np.exp(-np.abs(x))
        if self.kind == "harmonic":
            return x * x
        return self.shift + self.mult * np.abs(x) ** self.power


def sech_squared() -> AnalyticShape:
    return AnalyticShape("sech_squared")


def exponential() -> AnalyticShape:
    return AnalyticShape("exponential")


def shifted_power(shift: float, mult: float, power: float) -> AnalyticShape:
    return AnalyticShape("shifted_power", shift=shift, mult=mult, power=power)


def harmonic() -> AnalyticShape:
    return AnalyticShape("harmonic")


@dataclass
class HeadPlusSegments(PotentialShape):
    """Head model on [0, b] plus linear segments at x_k = b + k*h.

    ``nodes[k]`` holds g(x_{k+1}); g(x_0 = b) is the head value at b so the
    shape is continuous.  Beyond the last node the shape continues in a
    straight line with ``ext_slope`` (clipped at zero when ``cut_to_zero``).
    """

    head_kind: str  # "flat" | "power"
    f0: float
    b: float
    h: float
    head_mult: float = 0.0  # A in f0 + A x^q (power head)
    head_power: float = 2.0  # q
    nodes: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ext_slope: float = 0.0
    cut_to_zero: bool = False

    def __post_init__(self):
        if self.head_kind not in ("flat", "power"):
            raise ValueError(f"unknown head kind: {self.head_kind!r}")
        if self.b <= 0 or self.h <= 0:
            raise ValueError("b and h must be positive")
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.bounded = self.cut_to_zero

    def head_value(self, x):
        if self.head_kind == "flat":
            return self.f0 * np.ones_like(x)
        return self.f0 + self.head_mult * np.abs(x) ** self.head_power

    def head_slope_at_b(self) -> float:
        if self.head_kind == "flat":
            return 0.0
        return self.head_mult * self.head_power * self.b ** (self.head_power - 1.0)

    def knots(self):
        """x and g values at b and all segment nodes."""
        k = np.arange(self.nodes.size + 1)
        xs = self.b + k * self.h
        gs = np.concatenate(([float(self.head_value(np.array(self.b)))], self.nodes))
        return xs, gs

    def extended(self, y: float) -> "HeadPlusSegments":
        """Copy with one more node value y; the line through the new segment
        continues beyond it with the same slope."""
        gs_last = self.knots()[1][-1]
        # A decreasing last segment would make the tail unbounded below;
        # continue flat instead so the spectrum stays well defined.
        return HeadPlusSegments(
            head_kind=self.head_kind, f0=self.f0, b=self.b, h=self.h,
            head_mult=self.head_mult, head_power=self.head_power,
            nodes=np.concatenate((self.nodes, [y])),
            ext_slope=max((y - gs_last) / self.h, 0.0),
            cut_to_zero=self.cut_to_zero,
        )

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        xs, gs = self.knots()
        out = np.empty_like(x)
        head = x <= xs[0]
        out[head] = self.head_value(x[head])
        mid = (~head) & (x <= xs[-1])
        if np.any(mid):
            out[mid] = np.interp(x[mid], xs, gs)
        tail = x > xs[-1]
        if np.any(tail):
            ext = gs[-1] + self.ext_slope * (x[tail] - xs[-1])
            out[tail] = np.minimum(ext, 0.0) if self.cut_to_zero else ext
        return out


@dataclass
class TabulatedShape(PotentialShape):
    """Monotone-interpolated tabulated shape with linear extrapolation.

    Interpolation between nodes is shape-preserving piecewise cubic; beyond
    the last node the shape continues linearly with ``extrapolation_slope``
    (clipped at zero when ``cut_to_zero``).
    """

    x_grid: np.ndarray
    f_values: np.ndarray
    extrapolation_slope: float
    cut_to_zero: bool = False
    #: optional tail model used beyond the last node instead of the linear
    #: extrapolation: ("power", L, c, mu) evaluates L + c*x**mu and must pass
    #: through the last node; ("exp", lam) evaluates
    #: f_last * exp(-lam*(x - x_last)), a decaying approach to zero.
    tail: tuple | None = None

    def __post_init__(self):
        if self.tail is not None:
            kind, *params = self.tail
            if kind == "power":
                L, c, mu = params
                if not all(np.isfinite([L, c, mu])) or c * mu < 0:
                    raise ValueError("tail model must be finite and nondecreasing")
            elif kind == "exp":
                (lam,) = params
                if not (np.isfinite(lam) and lam > 0):
                    raise ValueError("exponential tail needs a positive decay rate")
            else:
                raise ValueError(f"unknown tail model {kind!r}")
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.f_values = np.asarray(self.f_values, dtype=float)
        if self.x_grid.ndim != 1 or self.x_grid.size < 2:
            raise ValueError("need at least two tabulation nodes")
        if np.any(np.diff(self.x_grid) <= 0):
            raise ValueError("x_grid must be strictly increasing")
        span = max(1.0, float(np.max(np.abs(self.f_values))))
        if np.any(np.diff(self.f_values) < -1e-9 * span):
            raise ValueError("tabulated values must be monotone nondecreasing")
        # Enforce exact monotonicity before building the interpolant.
        self.f_values = np.maximum.accumulate(self.f_values)
        self._interp = PchipInterpolator(self.x_grid, self.f_values, extrapolate=False)
        self.bounded = self.cut_to_zero

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        lo = x < self.x_grid[0]
        hi = x > self.x_grid[-1]
        mid = ~(lo | hi)
        out[mid] = self._interp(x[mid])
        out[lo] = self.f_values[0]
        if np.any(hi):
            if self.tail is not None and self.tail[0] == "power":
                L, c, mu = self.tail[1:]
                ext = L + c * x[hi] ** mu
            elif self.tail is not None:
                lam = self.tail[1]
                ext = self.f_values[-1] * np.exp(-lam * (x[hi] - self.x_grid[-1]))
            else:
                ext = self.f_values[-1] + self.extrapolation_slope * (x[hi] - self.x_grid[-1])
            out[hi] = np.minimum(ext, 0.0) if self.cut_to_zero else ext
        return out
