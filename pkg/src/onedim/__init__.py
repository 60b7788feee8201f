"""Numerical toolkit for right-angled Artin group actions on the interval and the circle.

Modules: ``graphs`` (cographs and P4 witnesses), ``diffeo`` and ``dynamics``
(maps, supports, rotation numbers), ``raag`` (words and actions),
``obstruction`` (interval combinatorics and derivative blow-up witnesses),
``verdict`` (lookup tables) and ``cli``.
"""
from .config import DEFAULT, RunConfig, Tolerances
from .errors import DomainError, InvariantViolation, NumericError, OneDimError, PreconditionError
from .intervals import IntervalSet, Manifold

__version__ = "0.1.0"

__all__ = ["DEFAULT", "RunConfig", "Tolerances", "DomainError", "InvariantViolation",
           "NumericError", "OneDimError", "PreconditionError", "IntervalSet", "Manifold"]
