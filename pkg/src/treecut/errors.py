"""Exception hierarchy shared by all treecut modules.

Validation problems (bad trees, bad parameters, malformed files) raise
:class:`ValidationError`; blown size or attempt budgets raise
:class:`ResourceLimitError`.  The CLI maps the former to exit code 2 and
the latter to exit code 3.
"""


class TreecutError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TreecutError, ValueError):
    """Invalid input: malformed tree, bad parameter, unusable request."""


class InvalidTreeError(ValidationError):
    """A parent array that does not describe a rooted tree."""


class CycleError(InvalidTreeError):
    """Parent links contain a cycle (some vertex unreachable from the root)."""


class RootCountError(InvalidTreeError):
    """Not exactly one root sentinel in the parent array."""


class ParentIndexError(InvalidTreeError):
    """A parent entry is outside ``[0, n)``."""


class TreeFormatError(ValidationError):
    """Tree text that violates the canonical two-line format."""


class DegenerateInputError(ValidationError):
    """Quantity undefined for this input (constant function, n=1 gap, ...)."""


class ResourceLimitError(TreecutError, RuntimeError):
    """A configured size or attempt cap was exceeded."""


class RejectionCapError(ResourceLimitError):
    """Rejection sampling gave up.

    Carries the number of attempts and, when available, an estimate of the
    per-attempt acceptance probability so callers can judge feasibility.
    """

    def __init__(self, message, attempts, acceptance_estimate=None):
        super().__init__(message)
        self.attempts = attempts
        self.acceptance_estimate = acceptance_estimate
