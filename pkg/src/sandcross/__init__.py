"""Sandpile dynamics on Z^2 with shape-discretized neighborhoods."""

from .grid import Cell, Configuration, Neighborhood, Odometer, moore, von_neumann
from .dynamics import (
    active_set,
    is_stable,
    parallel_step,
    stabilize,
    stabilize_sequential,
)

__all__ = [
    "Cell",
    "Configuration",
    "Neighborhood",
    "Odometer",
    "moore",
    "von_neumann",
    "active_set",
    "is_stable",
    "parallel_step",
    "stabilize",
    "stabilize_sequential",
]

__version__ = "0.1.0"
