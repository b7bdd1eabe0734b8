"""Exception hierarchy shared by all martot modules.

The CLI maps these onto exit codes: precondition/order problems exit
with 2, malformed input files with 3, oversized oracle instances with 4.
"""


class MartotError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(MartotError):
    """A documented precondition was violated (domain, order, parameter)."""


class OrderError(PreconditionError):
    """Measures fail a required order relation (equal means, convex order, BDA)."""


class ParseError(MartotError):
    """Malformed JSON input or a scalar string that cannot be parsed exactly."""


class ScaleError(MartotError):
    """Instance exceeds the size limit of a brute-force oracle."""


class InternalError(MartotError):
    """An internal consistency check failed; indicates a bug, not bad input."""
