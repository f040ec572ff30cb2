import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectra_invert.errors import KineticRangeExceeded, NonMonotone
from spectra_invert.kinetic import (KineticPotential, default_v_grid,
                                    fit_power_with_offset, k_function_closed,
                                    k_via_max, kinetic_to_trajectory,
                                    p_number, trajectory_to_kinetic)
from spectra_invert.shapes import harmonic, sech_squared, shifted_power
from spectra_invert.trajectory import (HarmonicTrajectory,
                                       SechSquaredTrajectory,
                                       pure_power_energy)


def sech2_fbar_exact(s: float) -> float:
    """Closed-form mean potential at fixed kinetic energy for -sech^2."""
    return -2.0 * s / (math.sqrt(s + s * s) + s)


def test_sech2_kinetic_closed_form():
    kin = trajectory_to_kinetic(SechSquaredTrajectory())
    for s in np.geomspace(1e-2, 1e2, 17):
        assert kin.evaluate(s) == pytest.approx(sech2_fbar_exact(s), abs=1e-8)


def test_legendre_roundtrip():
    for traj in (HarmonicTrajectory(), SechSquaredTrajectory()):
        kin = trajectory_to_kinetic(traj)
        for v in (0.5, 2.0, 9.0, 100.0):
            assert kinetic_to_trajectory(kin, v) == pytest.approx(
                traj.F(v), rel=1e-6, abs=1e-9)


def test_curvature_product():
    # F''(v) and fbar''(s) at s = s(v) multiply to -1/v^3.
    traj = SechSquaredTrajectory()
    kin = trajectory_to_kinetic(traj)
    for v in (2.0, 8.0, 32.0):
        h = 1e-4 * v
        Fpp = (traj.F(v + h) - 2 * traj.F(v) + traj.F(v - h)) / (h * h)
        s = traj.kinetic_term(v)
        # A wide stencil averages over the interpolant's local curvature noise.
        hs = 1e-2 * s
        fpp = (kin.evaluate(s + hs) - 2 * kin.evaluate(s)
               + kin.evaluate(s - hs)) / (hs * hs)
        assert Fpp * fpp == pytest.approx(-1.0 / v ** 3, rel=1e-3)


def test_p_number_harmonic():
    assert p_number(2.0, 1.0) == pytest.approx(0.5, rel=1e-12)


def test_p_number_three_halves():
    P = p_number(1.5, pure_power_energy(1.5))
    assert P == pytest.approx(0.45142, abs=1e-4)


def test_k_via_max_matches_closed_pure_power():
    for q in (1.0, 1.5, 2.0):
        shape = shifted_power(-1.0, 1.0, q)
        kf = k_function_closed(shape)
        E_q = pure_power_energy(q)
        from spectra_invert.trajectory import ShiftedPowerTrajectory
        traj = ShiftedPowerTrajectory(-1.0, 1.0, q, E_q)
        for x in (0.2, 1.0, 3.0):
            got = k_via_max(traj, float(shape(x)))
            assert got == pytest.approx(kf(x), rel=1e-4)


def test_k_via_max_matches_closed_sech2():
    traj = SechSquaredTrajectory()
    shape = sech_squared()
    kf = k_function_closed(shape)
    for x in (0.3, 1.0, 2.0):
        got = k_via_max(traj, float(shape(x)))
        assert got == pytest.approx(kf(x), rel=1e-4)


def test_shift_and_scale_leave_pure_power_K_unchanged():
    k1 = k_function_closed(shifted_power(-1.0, 1.0, 2.0))
    k2 = k_function_closed(shifted_power(3.0, 7.0, 2.0))
    for x in (0.5, 2.0):
        assert k1(x) == pytest.approx(k2(x), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.1, 5.0),
       st.floats(-1.8, 1.8).filter(lambda m: abs(m) > 0.05))
def test_fit_power_with_offset_exact(L, c, mu):
    s = np.array([0.5, 1.5, 4.5])
    f = L + c * s ** mu
    if np.any(~np.isfinite(f)):
        return
    Lf, cf, mf = fit_power_with_offset(s, f)
    assert mf == pytest.approx(mu, rel=1e-6, abs=1e-9)
    assert Lf == pytest.approx(L, rel=1e-6, abs=1e-8)


def test_kinetic_potential_validation():
    s = np.array([1.0, 2.0, 3.0])
    with pytest.raises(NonMonotone):
        KineticPotential(s, np.array([-1.0, -0.5, -0.7]))
    with pytest.raises(NonMonotone):
        KineticPotential(np.array([1.0, 1.0, 2.0]), np.array([-1, -2, -3.0]))


def test_kinetic_range_exceeded():
    kin = trajectory_to_kinetic(SechSquaredTrajectory(),
                                np.geomspace(1.0, 10.0, 50))
    with pytest.raises(KineticRangeExceeded):
        kin.evaluate(-1.0)
    with pytest.raises(KineticRangeExceeded):
        kin.evaluate(1e30)


def test_structural_invariants():
    # F concave, R strictly decreasing, s nonnegative.
    traj = SechSquaredTrajectory()
    vs = np.geomspace(0.3, 300.0, 60)
    F = np.array([traj.F(v) for v in vs])
    R = F / vs
    s = np.array([traj.kinetic_term(v) for v in vs])
    slopes = np.diff(F) / np.diff(vs)
    assert np.all(np.diff(slopes) < 1e-12)
    assert np.all(np.diff(R) < 0)
    assert np.all(s >= 0)
