"""Exception hierarchy shared by all subdyn modules.

The CLI maps these onto exit codes: InvalidInputError -> 2,
VerificationError -> 3, InconclusiveError -> 4.
"""


class SubdynError(Exception):
    """Base class for all subdyn errors."""


class InvalidInputError(SubdynError):
    """Input violates a precondition (bad symbol, inadmissible word, ...)."""


class VerificationError(SubdynError):
    """A certified bound or invariant failed to verify on actual data."""


class InconclusiveError(SubdynError):
    """The window / horizon / depth was too small to decide the question."""
