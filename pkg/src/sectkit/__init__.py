"""sectkit: exact desk-scale category theory.

Finite categories with total composition tables, simplicial replacements,
split (op)fibrations with their transpose and simplicial extension, Segal and
locally-constant section checkers under the strict convention, resolution
diagnostics, relative comma objects, and integer nerve homology.
"""

from .config import Config, DEFAULT_CAP, DEFAULT_DEPTH, DEFAULT_TRUNCATION
from .errors import (
    HypothesisViolatedError,
    MissingLimitError,
    NotIsofibrationError,
    QuotientNotFiniteError,
    SectkitError,
    SizeCapError,
    TruncationBudgetError,
    ValidationError,
)

__all__ = [
    "Config",
    "DEFAULT_CAP",
    "DEFAULT_DEPTH",
    "DEFAULT_TRUNCATION",
    "SectkitError",
    "ValidationError",
    "SizeCapError",
    "MissingLimitError",
    "TruncationBudgetError",
    "NotIsofibrationError",
    "QuotientNotFiniteError",
    "HypothesisViolatedError",
]

__version__ = "0.1.0"
