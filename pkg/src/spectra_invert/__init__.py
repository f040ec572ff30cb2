"""Reconstruction of Schrodinger potential shapes from ground-state
energy trajectories.

The operator is H = -d^2/dx^2 + v f(x) with f symmetric, bounded below,
and nondecreasing for x > 0.  Given the ground-state energy F(v) as a
function of the coupling v, this package recovers the shape f:

- :mod:`~spectra_invert.eigensolve` -- Numerov ground-state solver,
- :mod:`~spectra_invert.trajectory` -- F(v) evaluators and head fits,
- :mod:`~spectra_invert.kinetic` -- kinetic potential / Legendre transform,
- :mod:`~spectra_invert.constructive` -- node-by-node reconstruction,
- :mod:`~spectra_invert.functional` -- fixed-point iteration on shapes,
- :mod:`~spectra_invert.cli` -- ``spectra-invert`` command-line tool.
"""

from .constructive import (ConstructiveConfig, ReconstructionReport,
                           infer_bounded)
from .constructive import run as invert_constructive
from .eigensolve import SolverConfig, ground_energy, ground_state
from .errors import SpectraInvertError
from .functional import FunctionalConfig, IterateRecord
from .functional import run as invert_functional
from .kinetic import (KFunction, KineticPotential, k_function_closed,
                      k_via_max, kinetic_to_trajectory, p_number,
                      trajectory_to_kinetic)
from .shapes import (PotentialShape, TabulatedShape, exponential, harmonic,
                     sech_squared, shifted_power)
from .trajectory import (EnergyTrajectory, HarmonicTrajectory, HeadModel,
                         ImportedTrajectory, NumericTrajectory,
                         SechSquaredTrajectory, ShiftedPowerTrajectory,
                         estimate_f0, fit_head, invert_R)

__version__ = "0.1.0"

__all__ = [
    "ConstructiveConfig", "ReconstructionReport", "infer_bounded",
    "invert_constructive", "SolverConfig", "ground_energy", "ground_state",
    "SpectraInvertError", "FunctionalConfig", "IterateRecord",
    "invert_functional", "KFunction", "KineticPotential",
    "k_function_closed", "k_via_max", "kinetic_to_trajectory", "p_number",
    "trajectory_to_kinetic", "PotentialShape", "TabulatedShape",
    "exponential", "harmonic", "sech_squared", "shifted_power",
    "EnergyTrajectory", "HarmonicTrajectory", "HeadModel",
    "ImportedTrajectory", "NumericTrajectory", "SechSquaredTrajectory",
    "ShiftedPowerTrajectory", "estimate_f0", "fit_head", "invert_R",
    "__version__",
]
