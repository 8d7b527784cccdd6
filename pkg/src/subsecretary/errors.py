"""Exception hierarchy shared by every module."""


class SubsecretaryError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SubsecretaryError, ValueError):
    """Malformed arguments: out-of-range indices, bad shapes, bad parameters."""


class BudgetError(SubsecretaryError, RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


class ValidationError(InputError):
    """A loaded instance or report violates a schema invariant.

    The message always starts with the offending field path.
    """


class ParseError(InputError):
    """A file could not be decoded; the message carries line and column."""


class GuaranteeViolation(SubsecretaryError, AssertionError):
    """A checked approximation or feasibility guarantee did not hold."""
