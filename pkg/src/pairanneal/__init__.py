"""Quantum annealing with an ancilla-pair driver that cancels common longitudinal noise."""

from __future__ import annotations

from .bath import BathConfig, gamma
from .config import Axis, Scenario, SweepSpec, preset
from .errors import (ConfigError, DegenerateGroundState, EigenSolverError, NumericalAbort,
                     PairAnnealError)
from .master import lindblad_operators, liouvillian_apply, open_system, reduced_open_system
from .model import (Ancilla, AnnealSchedule, Conventional, ProblemInstance, annealing_system,
                    build_W, initial_state, physical_marginal, reference_instance)
from .propagation import Trajectory, integrate_closed, integrate_open

__version__ = "0.1.0"

__all__ = [
    "Ancilla", "AnnealSchedule", "Axis", "BathConfig", "ConfigError", "Conventional",
    "DegenerateGroundState", "EigenSolverError", "NumericalAbort", "PairAnnealError",
    "ProblemInstance", "Scenario", "SweepSpec", "Trajectory", "annealing_system", "build_W",
    "gamma", "initial_state", "integrate_closed", "integrate_open", "lindblad_operators",
    "liouvillian_apply", "open_system", "physical_marginal", "preset", "reduced_open_system",
    "reference_instance",
]
