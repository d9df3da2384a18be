"""Exception taxonomy shared across the package.

Two failure families matter to callers: bad inputs (files, matrices,
parameters) and the pipeline leaving its supported regime mid-run.  The CLI
maps them to exit codes 2 and 3 respectively.
"""
from __future__ import annotations

__all__ = [
    "InputError",
    "StructuralError",
    "DegenerateTripleError",
    "TieBreakError",
    "PathInvariantError",
    "MovingLemmaViolation",
]


class InputError(Exception):
    """User-supplied data is unusable (parse failure, non-metric matrix, bad ids)."""


class StructuralError(Exception):
    """A structural invariant the construction relies on was violated at runtime."""


class DegenerateTripleError(ValueError):
    """Curvature quantities are undefined on triples with a repeated point."""


class TieBreakError(StructuralError):
    """A uniqueness assumption (nearest-vertex tie) failed beyond tolerance."""


class PathInvariantError(StructuralError):
    """The working curve stopped being a simple path."""


class MovingLemmaViolation(StructuralError):
    """A point-moving implication failed although its hypotheses held."""
