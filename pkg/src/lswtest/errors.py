"""Exception hierarchy.

Input problems (bad lengths, shapes, labels) derive from :class:`InputError`
and map to CLI exit code 2; numerical failures derive from
:class:`NumericError` and map to exit code 3.
"""


class LSWTestError(Exception):
    """Base class for all package errors."""


class InputError(LSWTestError, ValueError):
    pass


class NumericError(LSWTestError, ArithmeticError):
    pass


class InvalidScaleError(InputError):
    pass


class DyadicLengthError(InputError):
    pass


class ShapeMismatchError(InputError):
    pass


class DomainError(InputError):
    pass


class InsufficientReplicatesError(InputError):
    pass


class UnknownModelError(InputError):
    pass


class ConditioningError(NumericError):
    pass


class InversionError(NumericError):
    pass


class DegenerateTestError(NumericError):
    """Every cell of a test family had zero variance."""
