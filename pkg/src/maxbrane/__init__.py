"""Exact computations around maximal involutions: lattices, Smith theory, Hilbert schemes."""

from .errors import (
    DegenerateLatticeError,
    InvariantError,
    MaxbraneError,
    PreconditionError,
    UnsupportedHypothesisError,
)

__all__ = [
    "DegenerateLatticeError",
    "InvariantError",
    "MaxbraneError",
    "PreconditionError",
    "UnsupportedHypothesisError",
]
