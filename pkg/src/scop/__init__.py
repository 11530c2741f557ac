"""Finite state-context-property systems."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import ExperimentSpec, ScopSystem, ValidationReport, validate
from .errors import ScopError
from .io import dump_system, load_system
from .subset_prob import ONE, ZERO, SubsetProb

__all__ = [
    "__version__",
    "SubsetProb",
    "ZERO",
    "ONE",
    "ScopSystem",
    "ExperimentSpec",
    "ValidationReport",
    "validate",
    "ScopError",
    "load_system",
    "dump_system",
]
