"""Bessel function of the first kind, real order, by ascending series.

Used to validate the exponential-well energy trajectory: the bound-state
condition there is a zero of J'_nu at nu = 2*sqrt(|E|), argument 2*sqrt(v).
The ascending series with compensated summation is accurate in the
moderate-argument regime validated here (x <= 25); larger arguments raise.
"""

from __future__ import annotations

import math

from .errors import OutOfValidatedRange

__all__ = ["bessel_j_real_order", "bessel_j_prime_real_order"]

_MAX_X = 25.0
_TERMS = 120


def _series(nu: float, x: float, weight_exponent: int = 0) -> float:
    """Kahan-compensated ascending series sum.

    weight_exponent = 0 gives J_nu(x); = 1 weights each term by (2k + nu)/x,
    which is the term-wise derivative of the series.
    """
    half = 0.5 * x
    quarter_sq = half * half
    # Leading term via lgamma once; subsequent terms by exact recurrence,
    # which keeps per-term rounding at a few ulps.
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    total = 0.0
    comp = 0.0
    for k in range(_TERMS):
        contrib = term * ((2 * k + nu) / x) if weight_exponent else term
        y = contrib - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < 1e-18 * max(abs(total), 1e-300) and k > half:
            break
        term *= -quarter_sq / ((k + 1.0) * (nu + k + 1.0))
    return total


def bessel_j_real_order(nu: float, x: float) -> float:
    """J_nu(x) for nu >= 0, 0 < x <= 25."""
    if nu < 0:
        raise ValueError("order nu must be nonnegative")
    if x <= 0:
        raise ValueError("argument x must be positive")
    if x > _MAX_X:
        raise OutOfValidatedRange(f"series validated only for x <= {_MAX_X:g}")
    return _series(nu, x)


def bessel_j_prime_real_order(nu: float, x: float) -> float:
    """dJ_nu/dx; recurrence (J_{nu-1} - J_{nu+1})/2 for nu >= 1, term-wise
    series derivative for smaller orders."""
    if x <= 0:
        raise ValueError("argument x must be positive")
    if x > _MAX_X:
        raise OutOfValidatedRange(f"series validated only for x <= {_MAX_X:g}")
    if nu >= 1.0:
        return 0.5 * (_series(nu - 1.0, x) - _series(nu + 1.0, x))
    return _series(nu, x, weight_exponent=1)
