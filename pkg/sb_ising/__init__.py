"""Simulated-Bifurcation-Ising-Solver für MAXCUT mit idealer und Hardware-Engine."""
from __future__ import annotations

from .exceptions import (
    DimensionError,
    InstanceFormatError,
    MissingDenominatorError,
    OracleCapacityError,
    SbIsingError,
    ValidationError,
)
from .ising_core import (
    CouplingMatrix,
    ProblemInstance,
    brute_force_ground_state,
    cut_size,
    ising_energy,
    load_instance,
    random_graph,
    save_instance,
)
from .sb_solver import NoiseKind, NoiseSchedule, SbParams, TrialResult, run_trial, run_trials

__version__ = "1.0.0"

__all__ = [
    "CouplingMatrix",
    "DimensionError",
    "InstanceFormatError",
    "MissingDenominatorError",
    "NoiseKind",
    "NoiseSchedule",
    "OracleCapacityError",
    "ProblemInstance",
    "SbIsingError",
    "SbParams",
    "TrialResult",
    "ValidationError",
    "brute_force_ground_state",
    "cut_size",
    "ising_energy",
    "load_instance",
    "random_graph",
    "run_trial",
    "run_trials",
    "save_instance",
]
