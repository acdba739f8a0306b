"""Exception hierarchy for hsbary.

Every input-validation failure derives from :class:`InputError` (a
``ValueError``); numerical breakdowns derive from :class:`NumericalError`.
The CLI maps the former to exit code 2 and the latter to exit code 3.
"""


class HSError(Exception):
    """Base class for all library errors."""


class InputError(HSError, ValueError):
    """Malformed or out-of-domain input."""


class EmptyMeasure(InputError):
    pass


class NegativeAtom(InputError):
    pass


class WeightSumMismatch(InputError):
    pass


class OutOfRange(InputError):
    pass


class DegenerateAtZero(InputError):
    """The operation needs a measure other than the point mass at 0."""


class NonpositiveY(InputError):
    pass


class NotSubcritical(InputError):
    pass


class SupercriticalInput(InputError):
    pass


class KOutOfRange(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class NumericalError(HSError, ArithmeticError):
    """A solver or resource guard failed."""


class SolverFailure(NumericalError):
    pass


class ResourceLimit(NumericalError):
    pass
