# potential/__init__.py
from .solver import (
    HarmonicData,
    PotentialSolver,
    constant_boundary,
    effective_resistance,
    green,
    harmonic_extension,
    harmonic_measure,
    indicator_boundary,
)

__all__ = [
    "HarmonicData",
    "PotentialSolver",
    "constant_boundary",
    "effective_resistance",
    "green",
    "harmonic_extension",
    "harmonic_measure",
    "indicator_boundary",
]
