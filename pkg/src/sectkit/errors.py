"""Exception hierarchy shared by all sectkit modules."""


class SectkitError(Exception):
    """Base class for all errors raised by sectkit."""


class ValidationError(SectkitError):
    """Input data violates a structural invariant."""


class SizeCapError(SectkitError):
    """An exhaustive enumeration would exceed the configured size cap.

    Raised loudly instead of hanging; carries the offending count and cap.
    """

    def __init__(self, what: str, count: int, cap: int):
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} candidates exceeds size cap {cap}")


class MissingLimitError(SectkitError):
    """A required fibre limit (terminal object or pullback) does not exist."""


class TruncationBudgetError(SectkitError):
    """The input is not truncated deeply enough for the requested operation."""


class NotIsofibrationError(SectkitError):
    """An operation required an isofibration and the given functor is not one."""


class QuotientNotFiniteError(SectkitError):
    """Formal inversion of the marked maps does not close up at desk scale."""


class HypothesisViolatedError(SectkitError):
    """A square factorisation was requested for a square outside the lemma's hypothesis."""
