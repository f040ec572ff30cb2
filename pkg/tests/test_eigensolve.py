import math

import numpy as np
import pytest
from scipy.integrate import simpson

from spectra_invert.eigensolve import (SolverConfig, concentration,
                                       ground_energy, ground_state,
                                       mean_potential)
from spectra_invert.errors import DomainTooSmall
from spectra_invert.shapes import harmonic, sech_squared, shifted_power

from conftest import sech2_energy


def test_sech2_closed_form(sech2_shape):
    for v in (1.0, 2.0, 5.0, 10.0, 100.0):
        assert abs(ground_energy(sech2_shape, v) - sech2_energy(v)) < 1e-6


def test_harmonic_closed_form(harmonic_shape):
    for v in (0.5, 1.0, 4.0, 25.0):
        assert ground_energy(harmonic_shape, v) == pytest.approx(
            math.sqrt(v), abs=1e-7)


def test_pure_power_three_halves():
    shape = shifted_power(0.0, 1.0, 1.5)
    assert ground_energy(shape, 1.0) == pytest.approx(1.001184, abs=1e-5)


def test_scaling_law_pure_power():
    # E(v) = v^{2/(2+q)} E(1) for f = |x|^q.
    q = 1.5
    shape = shifted_power(0.0, 1.0, q)
    e1 = ground_energy(shape, 1.0)
    for v in (3.0, 10.0):
        assert ground_energy(shape, v) == pytest.approx(
            v ** (2.0 / (2.0 + q)) * e1, rel=1e-7)


def test_ground_state_normalized_and_nodeless(sech2_shape):
    res = ground_state(sech2_shape, 5.0)
    assert res.node_count == 0
    norm = 2.0 * simpson(res.psi ** 2, x=res.x_grid)
    assert norm == pytest.approx(1.0, abs=1e-6)
    # exact ground state is sech^{2|E|^{1/2}}(x), positive everywhere
    assert np.all(res.psi > -1e-12)


def test_mean_potential_hellmann_feynman(sech2_shape):
    # dF/dv for the closed trajectory F = -(sqrt(v+1/4)-1/2)^2.
    v = 5.0
    res = ground_state(sech2_shape, v)
    root = math.sqrt(v + 0.25)
    exact = -(root - 0.5) / root
    assert mean_potential(res, sech2_shape) == pytest.approx(exact, abs=1e-6)


def test_concentration_monotone_in_a(sech2_shape):
    res = ground_state(sech2_shape, 10.0)
    qs = [concentration(res, a) for a in (0.5, 1.0, 2.0)]
    assert qs[0] < qs[1] < qs[2] <= 1.0 + 1e-9


def test_fixed_domain_too_small(sech2_shape):
    # Large enough to bind the state, too small for the decay check.
    cfg = SolverConfig(domain_half_width=3.0)
    with pytest.raises(DomainTooSmall):
        ground_energy(sech2_shape, 5.0, cfg)


def test_rejects_nonpositive_coupling(sech2_shape):
    with pytest.raises(ValueError):
        ground_energy(sech2_shape, 0.0)


def test_solve_speed(sech2_shape):
    from spectra_invert import kernels
    if not kernels.USING_NUMBA:
        pytest.skip("timing target applies to the compiled kernels")
    import time
    t0 = time.time()
    ground_energy(sech2_shape, 7.3)
    assert time.time() - t0 < 1.0
