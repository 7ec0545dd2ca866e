"""Malleable scheduling with M-natural concave speed functions.

The solver works in exact rational arithmetic.  ``round`` runs the
configuration LP and the three rounding steps; ``solve_mmfa`` applies the
same machinery to max-min fair allocation with shared items.
"""

from .configlp import ConfigLpSolution, binary_search_C, build_and_solve
from .core import (Assignment, ExplicitMatroid, ExplicitTable, FreeMatroid, GsError, Instance, InvariantViolation,
                   LinearShift, LinearSpeed, MatroidBasedValuation, PartitionMatroid, Schedule, UniformMatroid,
                   ValidationError, WeightedMatroidRank, load, machine_loads)
from .kernels import BACKEND
from .mmfa import MmfaInstance, solve_mmfa
from .rounding import LpInfeasible, RoundingResult, round
from .schedule import build_schedule, verify_schedule

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BACKEND", "ConfigLpSolution", "ExplicitMatroid", "ExplicitTable", "FreeMatroid", "GsError",
    "Instance", "InvariantViolation", "LinearShift", "LinearSpeed", "LpInfeasible", "MatroidBasedValuation",
    "MmfaInstance", "PartitionMatroid", "RoundingResult", "Schedule", "UniformMatroid", "ValidationError",
    "WeightedMatroidRank", "binary_search_C", "build_and_solve", "build_schedule", "load", "machine_loads", "round",
    "solve_mmfa", "verify_schedule",
]
