"""Scalable single-pulse mixture characterization (SSMC).

Designs one concatenated control pulse that sequentially zeroes the optical
response of every species in a simulated quantum mixture, stores the pulse
and the per-species response traces as a reusable library, and recovers
relative concentrations from a measured mixture response by least squares.

Two model families are provided: driven Morse-oscillator diatomics on a
coordinate grid and driven Fermi-Hubbard rings in a fixed-number Fock basis.
"""

from .pulses import (FieldKind, SampledField, TimeGrid, concat_pulses,
                     make_time_grid, pump_phase_hubbard, pump_pulse_molecular)
from .units import DEFAULT_UNITS, UnitSystem, convert
from .morse import MorseEnsemble, MorseSpec
from .hubbard import HubbardEnsemble, HubbardSpec
from .protocol import (ResponseLibrary, assemble_A, extend_library,
                       make_ensemble, run_naive, run_ssmc)
from .estimator import (ConcentrationSolver, EstimationReport, add_noise,
                        condition_number, error_norm, mixture_response,
                        random_concentrations, solve_concentrations)
from .libio import load_library, save_library
from .config import ExperimentConfig, parse_config

__version__ = "0.1.0"

__all__ = [
    "ConcentrationSolver", "DEFAULT_UNITS", "EstimationReport",
    "ExperimentConfig", "FieldKind", "HubbardEnsemble", "HubbardSpec",
    "MorseEnsemble", "MorseSpec", "ResponseLibrary", "SampledField",
    "TimeGrid", "UnitSystem", "add_noise", "assemble_A", "concat_pulses",
    "condition_number", "convert", "error_norm", "extend_library",
    "load_library", "make_ensemble", "make_time_grid", "mixture_response",
    "parse_config", "pump_phase_hubbard", "pump_pulse_molecular",
    "random_concentrations", "run_naive", "run_ssmc", "save_library",
    "solve_concentrations",
]
