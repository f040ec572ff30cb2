import math

import numpy as np
import pytest

from spectra_invert.functional import (FunctionalConfig, run,
                                       seed_trajectory_check, step)
from spectra_invert.kinetic import trajectory_to_kinetic
from spectra_invert.shapes import sech_squared, shifted_power
from spectra_invert.trajectory import (SechSquaredTrajectory,
                                       ShiftedPowerTrajectory,
                                       analytic_trajectory,
                                       pure_power_energy)


def small_cfg(x_max=2.0, n=25, iters=2):
    return FunctionalConfig(x_grid=np.linspace(0.05, x_max, n),
                            max_iterations=iters)


def test_config_validation():
    with pytest.raises(ValueError):
        FunctionalConfig(x_grid=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        FunctionalConfig(x_grid=np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        FunctionalConfig(max_iterations=0)


def test_seed_trajectory_check():
    seed = shifted_power(-1.0, 1.0 / 20.0, 2.0)
    traj = seed_trajectory_check(seed)
    assert traj.F(10.0) == pytest.approx(-10.0 + math.sqrt(0.5), abs=1e-6)
    with pytest.raises(ValueError):
        seed_trajectory_check(sech_squared())


def test_identity_fixed_point():
    # Target equal to the current shape: one update must reproduce it.
    cfg = small_cfg()
    q = 2.0
    target = ShiftedPowerTrajectory(-1.0, 1.0, q, pure_power_energy(q))
    kin = trajectory_to_kinetic(target)
    shape = shifted_power(-1.0, 1.0, q)
    vals = step(shape, kin, cfg)
    assert np.max(np.abs(vals - shape(cfg.x_grid))) <= 1e-4


def test_pure_power_seed_first_iterate():
    # Pure-power seed x^p against pure-power target x^q: the first update is
    # again a pure power, with exponent q and the P-constant ratio as scale.
    cfg = small_cfg()
    p, q = 2.0, 1.0
    target = ShiftedPowerTrajectory(-1.0, 1.0, q, pure_power_energy(q))
    kin = trajectory_to_kinetic(target)
    seed = shifted_power(-1.0, 1.0, p)
    vals = step(seed, kin, cfg)
    Pp = (abs(pure_power_energy(p)) ** ((2 + p) / (2 * p))
          * (2 / (2 + p)) ** (1 / p) * (p / (2 + p)) ** 0.5)
    Pq = (abs(pure_power_energy(q)) ** ((2 + q) / (2 * q))
          * (2 / (2 + q)) ** (1 / q) * (q / (2 + q)) ** 0.5)
    expected = -1.0 + (Pq / Pp) ** q * cfg.x_grid ** q
    assert np.max(np.abs(vals - expected)) <= 2e-3


def test_two_step_pure_power_exactness():
    # Pure-power targets are recovered exactly by the second iterate.
    cases = [(2.0, 1.5), (1.0, 2.0)]
    for p, q in cases:
        cfg = small_cfg(iters=2)
        target = ShiftedPowerTrajectory(-1.0, 1.0, q, pure_power_energy(q))
        seed = shifted_power(-1.0, 1.0, p)
        exact = shifted_power(-1.0, 1.0, q)
        records = run(target, seed, cfg, target_shape=exact)
        assert records[-1].dist_target <= 5e-3


def test_seed_shift_invariance():
    # Affine changes of the seed leave the first iterate unchanged.
    cfg = small_cfg(n=15)
    target = ShiftedPowerTrajectory(-1.0, 1.0, 1.5, pure_power_energy(1.5))
    kin = trajectory_to_kinetic(target)
    base = step(shifted_power(0.0, 1.0, 2.0), kin, cfg)
    moved = step(shifted_power(3.0, 2.0, 2.0), kin, cfg)
    assert np.max(np.abs(base - moved)) <= 1e-4


def test_sech2_first_iterate_closed_form():
    # Seed -1 + x^2/20 against the sech-squared target has a closed first
    # iterate: -2 / (1 + sqrt(1 + 4 x^2)).
    cfg = FunctionalConfig(x_grid=np.linspace(0.02, 4.0, 30))
    kin = trajectory_to_kinetic(SechSquaredTrajectory())
    seed = shifted_power(-1.0, 1.0 / 20.0, 2.0)
    vals = step(seed, kin, cfg)
    xs = cfg.x_grid
    exact = -2.0 / (1.0 + np.sqrt(1.0 + 4.0 * xs * xs))
    assert np.max(np.abs(vals - exact)) <= 2e-3
